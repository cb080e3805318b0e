/// One row of a convergence trace.
///
/// `value` is the hull gap `‖p - p'‖` for membership runs and the residual
/// estimate `E(t)` for linear-system runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord<T> {
    pub iteration: usize,
    pub shift: T,
    pub value: T,
    pub alpha_b: Option<T>,
    pub pivot: Option<usize>,
    pub step: Option<T>,
    pub witness: bool,
}
