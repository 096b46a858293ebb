//! Flight planning front end: great-circle geometry, a simple aircraft
//! performance model, the 3-D airway graph over flight levels and the
//! compilation of traffic flow restrictions into a core instance.

pub mod aircraft;
pub mod compile;
pub mod geo;
pub mod network;
pub mod space;
pub mod tfr;

pub use aircraft::{Aircraft, ArcCost, Level, LevelChange, LevelTable};
pub use compile::{compile, Aggregate, ArcInfo, CompileError, CompileReport, CompiledInstance, Route};
pub use geo::{great_circle_km, LatLon, EARTH_RADIUS_KM};
pub use network::{NetworkError, ProjectedNetwork, Segment, Waypoint};
pub use space::{Expansion, SearchSpace, Vertex3d, DETOUR_FACTOR};
pub use tfr::{parse_tfrs, write_tfrs, Subject, Tfr, TfrLiteral, TfrParseError};
