//! Colored Petri nets whose places and transitions live in three
//! communication spaces (surface, observation, computation), with a
//! group-agent message layer, explicit state-space analysis and two
//! runnable scenarios.
//!
//! ```
//! use csnet::color::{ColorSet, ColorValue};
//! use csnet::engine::{run, FiringPolicy};
//! use csnet::net::{ArcExpr, ArcPattern, Net, Transition};
//!
//! let mut net = Net::new();
//! net.colorset(ColorSet::unit("U"))
//!     .place("P1", "U")
//!     .place("P2", "U")
//!     .add_transition(
//!         Transition::new("T")
//!             .input("P1", ArcPattern::Lit(ColorValue::Unit))
//!             .output("P2", ArcExpr::Lit(ColorValue::Unit)),
//!     )
//!     .token("P1", ColorValue::Unit);
//! let trace = run(&net, FiringPolicy::default(), 0, 10);
//! assert_eq!(trace.len(), 1);
//! assert_eq!(trace.final_marking.count("P2"), 1);
//! ```

pub mod analysis;
pub mod cli;
pub mod color;
pub mod engine;
pub mod format;
pub mod group;
pub mod marking;
pub mod net;
pub mod scenarios;
pub mod space;

pub use color::{ColorSet, ColorValue};
pub use engine::{enabled_bindings, fire, run, Event, FiringPolicy, Trace};
pub use marking::Marking;
pub use net::{validate_net, Net, Transition, Violation};
pub use space::{validate_layering, CommSpaceNet, SpaceKind};
