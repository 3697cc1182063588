//! Single-pass instruction sequences, regular threads and processes.
//!
//! The pipeline runs from PGAmr/PGLDmr programs through thread extraction to
//! labeled transition systems, with services attached through the use
//! operator, synthesis of programs from linear process specifications, and
//! strong and rooted branching bisimulation checkers to compare results.
//!
//! ```
//! use isaw_core::{extract_thread, pextr, pgld_to_pga, rooted_branching_bisimilar};
//! use isaw_core::{lts_from_linear_spec, parse_linear_process_spec, synth_multireply};
//!
//! let spec = parse_linear_process_spec("X = a . X + b ;")?;
//! let program = synth_multireply(&spec)?;
//! assert_eq!(program.to_string(), "+[2]ac(a,b) ; ##1 ; ##0");
//! let process = pextr(&extract_thread(&pgld_to_pga(&program)));
//! let expected = lts_from_linear_spec(&spec, spec.root())?;
//! assert!(rooted_branching_bisimilar(&expected, &process));
//! # Ok::<(), isaw_core::Error>(())
//! ```

pub mod bisim;
pub mod extract;
pub mod format;
pub mod lps;
pub mod lts;
pub mod pga;
pub mod pgld;
pub mod process;
pub mod service;
pub mod synth;
pub mod syntax;
pub mod thread;

pub use bisim::{rooted_branching_bisimilar, strong_bisimilar};
pub use extract::extract_thread;
pub use lps::{lts_from_linear_spec, parse_linear_process_spec, LinearProcessSpec, Summand};
pub use lts::{ActionLabel, Data, Lts};
pub use pga::{canonical_form, parse_pga, InstructionSequence, PgaTerm};
pub use pgld::{parse_pgld, pgld_to_pga, PgldProgram};
pub use process::{pextr, pextr_c, service_lts, use_process, use_process_lts};
pub use service::{use_thread, AnyService, Service};
pub use synth::{synth_binary, synth_multireply, to_single_occurrence};
pub use syntax::ParseError;
pub use thread::{normalize, parse_linear_thread_spec, thread_equal, ThreadAutomaton};

use thiserror::Error;

/// Any error the library reports.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Thread(#[from] thread::ThreadError),
    #[error(transparent)]
    Service(#[from] service::ServiceError),
    #[error(transparent)]
    Lts(#[from] lts::LtsError),
    #[error(transparent)]
    Spec(#[from] lps::SpecError),
    #[error(transparent)]
    Synth(#[from] synth::SynthError),
}
