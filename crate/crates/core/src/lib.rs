//! MiniOO: objects as records of closures, with structural type inference.

pub mod diagnostic;
pub mod driver;
pub mod eval;
pub mod golden;
pub mod infer;
pub mod repl;
pub mod syntax;
pub mod typesys;

pub use driver::{check, run, run_captured, Checked, Failure, Source};
pub use eval::{Interpreter, RuntimeFault, Store, Value};
pub use infer::{check_program, infer_program, Scheme, TypeEnv, TypeError};
pub use syntax::{parse_source, ParseContext, Program};
pub use typesys::{Label, Row, Type};

/// Stack size for threads that evaluate programs.
pub const STACK_SIZE: usize = 256 << 20;

/// Runs `f` on a thread with a [`STACK_SIZE`] stack.
pub fn with_big_stack<T: Send + 'static>(f: impl FnOnce() -> T + Send + 'static) -> T {
    std::thread::Builder::new()
        .stack_size(STACK_SIZE)
        .spawn(f)
        .expect("spawn evaluator thread")
        .join()
        .unwrap_or_else(|p| std::panic::resume_unwind(p))
}
