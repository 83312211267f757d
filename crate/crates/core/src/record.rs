/// One revealed interaction: the chosen arm's context, the arm, and its reward.
#[derive(Debug, Clone, PartialEq)]
pub struct BanditRecord {
    /// Round in which the action was taken (1-based).
    pub round: usize,
    pub context: Vec<f64>,
    /// Zero-based arm index.
    pub action: usize,
    pub reward: f64,
}

impl BanditRecord {
    pub fn new(round: usize, context: Vec<f64>, action: usize, reward: f64) -> Self {
        Self {
            round,
            context,
            action,
            reward,
        }
    }
}
