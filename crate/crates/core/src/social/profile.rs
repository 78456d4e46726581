use std::collections::BTreeSet;

/// One `(area, timeslot)` routine entry: the vehicle is in `area` during `timeslot`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RoutineTag {
    pub area: String,
    pub timeslot: String,
}

impl RoutineTag {
    pub fn new(area: impl Into<String>, timeslot: impl Into<String>) -> Self {
        RoutineTag {
            area: area.into(),
            timeslot: timeslot.into(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SocialProfile {
    tags: BTreeSet<RoutineTag>,
}

impl SocialProfile {
    pub fn new(tags: impl IntoIterator<Item = RoutineTag>) -> Self {
        SocialProfile {
            tags: tags.into_iter().collect(),
        }
    }

    pub fn single(area: &str, timeslot: &str) -> Self {
        Self::new([RoutineTag::new(area, timeslot)])
    }

    pub fn tags(&self) -> impl Iterator<Item = &RoutineTag> {
        self.tags.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.tags.is_empty()
    }
}

/// Two vehicles hold a social relationship when they share at least one routine.
pub fn sor_match(a: &SocialProfile, b: &SocialProfile) -> bool {
    if std::ptr::eq(a, b) {
        return !a.tags.is_empty();
    }
    let (small, large) = if a.tags.len() <= b.tags.len() { (a, b) } else { (b, a) };
    small.tags.iter().any(|t| large.tags.contains(t))
}
