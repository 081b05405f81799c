//! Command-line front end: configuration parsing, experiment orchestration,
//! CSV/JSON emission.

pub mod commands;
pub mod config;
pub mod output;
pub mod synth;

pub use commands::{run, EXIT_OK, EXIT_SOLVER_ERROR, EXIT_VERDICT_FAILURE};
pub use config::{parse_config, Command, ConfigError, RunConfig};

pub const USAGE: &str = "\
usage: bulksurf <command> [--config <file>] [--key value]...

commands:
  eigen-ball    principal eigenvalue of the ball by radial shooting
  eigen-fem     finite-element eigenvalue on a disk or rectangle mesh
  hessian       diagonalized shape-Hessian rows a_k at the unit ball
  hessian-fd    finite-difference cross-check of one Hessian row
  regime-scan   sign classification of the Hessian rows up to k_max
  talenti       randomized Talenti comparison suite (robin|dirichlet|coupled)
  nonexistence  eigenvalue scan over thinning rectangles of fixed area
  fk-check      eigenvalue symmetrization inequality on random coefficients
  limit-gap     gap lambda - c_i along c_i -> -infinity vs. the Robin limit

Flags are --key value; `key = value` lines in a --config file are applied
first and overridden by flags. Output goes to <out>.csv and <out>.json.
BULKSURF_THREADS caps worker threads (0 = all cores).

Polar disk fields serialize as CSV rows `ring_index,r,theta_index,value`;
meshes as plain text VERTICES / TRIANGLES / BOUNDARY sections with 17
significant digits.
";

/// Full CLI entry: parse then run, mapping parse failures to exit code 2.
pub fn run_cli(args: &[String]) -> i32 {
    if args.first().map(String::as_str) == Some("--help") || args.is_empty() {
        print!("{USAGE}");
        return if args.is_empty() {
            commands::EXIT_SOLVER_ERROR
        } else {
            commands::EXIT_OK
        };
    }
    match parse_config(args) {
        Ok(cfg) => run(&cfg),
        Err(e) => {
            eprintln!("error: {e}");
            eprint!("{USAGE}");
            commands::EXIT_SOLVER_ERROR
        }
    }
}
