use thiserror::Error;

use super::centrality::CentralityScores;

const SUM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum WeightError {
    #[error("weight {name} = {value} is outside [0, 1]")]
    OutOfRange { name: &'static str, value: f64 },
    #[error("weights sum to {0}, expected 1")]
    BadSum(f64),
    #[error("hop index {hop} outside 0..={ttl}")]
    HopOutOfRange { hop: u32, ttl: u32 },
    #[error("gateway weight bounds [{min}, {max}] are not an ordered sub-range of [0, 1]")]
    BadBounds { min: f64, max: f64 },
}

/// Mixing weights of the structural-influence score: betweenness, closeness,
/// degree and gateway adjacency. Always sums to one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrWeights {
    w_bc: f64,
    w_cc: f64,
    w_dc: f64,
    w_ec: f64,
}

impl StrWeights {
    pub fn new(w_bc: f64, w_cc: f64, w_dc: f64, w_ec: f64) -> Result<Self, WeightError> {
        for (name, value) in [("w_bc", w_bc), ("w_cc", w_cc), ("w_dc", w_dc), ("w_ec", w_ec)] {
            if !(0.0..=1.0).contains(&value) {
                return Err(WeightError::OutOfRange { name, value });
            }
        }
        let sum = w_bc + w_cc + w_dc + w_ec;
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(WeightError::BadSum(sum));
        }
        Ok(StrWeights { w_bc, w_cc, w_dc, w_ec })
    }

    /// Rescales arbitrary nonnegative weights to sum to one.
    pub fn normalized(w_bc: f64, w_cc: f64, w_dc: f64, w_ec: f64) -> Result<Self, WeightError> {
        let sum = w_bc + w_cc + w_dc + w_ec;
        if !sum.is_finite() || sum <= 0.0 {
            return Err(WeightError::BadSum(sum));
        }
        Self::new(w_bc / sum, w_cc / sum, w_dc / sum, w_ec / sum)
    }

    pub fn equal() -> Self {
        StrWeights { w_bc: 0.25, w_cc: 0.25, w_dc: 0.25, w_ec: 0.25 }
    }

    /// Gateway weight `w_ec`, the remainder split evenly over the other three.
    pub fn with_gateway_weight(w_ec: f64) -> Result<Self, WeightError> {
        if !(0.0..=1.0).contains(&w_ec) {
            return Err(WeightError::OutOfRange { name: "w_ec", value: w_ec });
        }
        let rest = (1.0 - w_ec) / 3.0;
        Self::new(rest, rest, rest, w_ec)
    }

    pub fn w_bc(&self) -> f64 {
        self.w_bc
    }
    pub fn w_cc(&self) -> f64 {
        self.w_cc
    }
    pub fn w_dc(&self) -> f64 {
        self.w_dc
    }
    pub fn w_ec(&self) -> f64 {
        self.w_ec
    }

    pub fn sum(&self) -> f64 {
        self.w_bc + self.w_cc + self.w_dc + self.w_ec
    }

    pub fn score(&self, c: &CentralityScores) -> f64 {
        self.w_bc * c.betweenness
            + self.w_cc * c.closeness
            + self.w_dc * c.degree
            + self.w_ec * c.eigenvector
    }
}

/// Per-hop weights: the gateway term grows linearly from `w_ec_min` at the
/// detector to `w_ec_max` at the last hop, shifting mass away from the
/// path-quality terms as the packet travels.
pub fn weight_schedule(
    hop_index: u32,
    ttl_initial: u32,
    w_ec_min: f64,
    w_ec_max: f64,
) -> Result<StrWeights, WeightError> {
    if hop_index > ttl_initial {
        return Err(WeightError::HopOutOfRange { hop: hop_index, ttl: ttl_initial });
    }
    if !(0.0 <= w_ec_min && w_ec_min <= w_ec_max && w_ec_max <= 1.0) {
        return Err(WeightError::BadBounds { min: w_ec_min, max: w_ec_max });
    }
    let frac = hop_index as f64 / ttl_initial.max(1) as f64;
    let w_ec = if hop_index == ttl_initial && ttl_initial > 0 {
        w_ec_max
    } else {
        w_ec_min + (w_ec_max - w_ec_min) * frac
    };
    StrWeights::with_gateway_weight(w_ec)
}
