//! Approximate Strong Stackelberg Equilibria in two-player general-sum
//! extensive-form games with imperfect information and perfect recall.
//!
//! The solver samples follower restricted pure strategies with UCT over an
//! auxiliary one-player game ([`afg`], [`uct`]). For each sample it builds a
//! leader behavior-strategy tree for which the sample is a best response,
//! alternating feasibility and payoff-improving passes against a cached
//! follower best-response oracle ([`leader`], [`follower`]). The best feasible
//! profile seen across all samples is returned.
//!
//! Supporting modules provide the game model ([`game`]), benchmark generators
//! ([`suite`]), an exact multiple-LP baseline for small games ([`exact`]) and
//! an experiment harness ([`harness`]).

pub mod afg;
pub mod error;
pub mod exact;
pub mod follower;
pub mod game;
pub mod harness;
pub mod leader;
pub mod suite;
pub mod uct;

mod deadline;

pub use deadline::Deadline;
pub use error::{AfgError, DescriptorError, ExactError, GameError, HarnessError, SolveError};
pub use game::{
    ExtensiveGame, FollowerPureStrategy, LeaderBehaviorStrategy, Payoff, Player, PureStrategy,
};
