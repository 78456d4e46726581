//! Routine profiles, community neighbor lists, contact-graph snapshots and
//! the structural-influence score used to rank relay candidates.

mod centrality;
mod neighbors;
mod profile;
mod snapshot;
mod weights;

pub use centrality::{
    betweenness_centrality, closeness_centrality, compute_str, degree_centrality,
    eigenvector_gateway_centrality, CentralityScores, CentralityTable,
};
pub use neighbors::{Beacon, NeighborEntry, NeighborList};
pub use profile::{sor_match, RoutineTag, SocialProfile};
pub use snapshot::{build_snapshot, GraphError, GraphSnapshot};
pub use weights::{weight_schedule, StrWeights, WeightError};
