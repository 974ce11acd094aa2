use crate::error::Result;

/// A vector objective `F: R^n -> R^m` with per-objective (stochastic) gradients.
///
/// Finite-sum problems report their sample count; batches passed to
/// [`gradient`](MultiObjective::gradient) are indices into that sample set.
/// Deterministic problems return `None` from
/// [`num_samples`](MultiObjective::num_samples) and always receive `None`
/// batches, i.e. exact gradients.
pub trait MultiObjective: Sync {
    fn num_objectives(&self) -> usize;

    fn dim(&self) -> usize;

    fn num_samples(&self) -> Option<usize>;

    /// Full objective vector at `x`.
    fn values(&self, x: &[f64]) -> Result<Vec<f64>>;

    fn gradient(&self, objective: usize, x: &[f64], batch: Option<&[usize]>) -> Result<Vec<f64>>;
}
