use nalgebra::{DMatrix, DVector};

use super::{NetError, Network};

/// Lower bound applied after each damping decrease so that repeated
/// successes cannot drive the damping to zero.
pub const MU_FLOOR: f64 = 1e-20;

/// Levenberg-Marquardt settings.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    /// Training stops as soon as the mean squared error is at or below this.
    pub mse_goal: f64,
    pub max_epochs: usize,
    pub mu_init: f64,
    pub mu_decrease: f64,
    pub mu_increase: f64,
    pub mu_max: f64,
    /// Stop when the largest gradient component falls below this.
    pub min_gradient: f64,
    /// Seed for the initial weights.
    pub rng_seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            mse_goal: 0.1,
            max_epochs: 1000,
            mu_init: 1e-3,
            mu_decrease: 0.1,
            mu_increase: 10.0,
            mu_max: 1e10,
            min_gradient: 1e-7,
            rng_seed: 0,
        }
    }
}

impl TrainConfig {
    // Negated comparisons so that NaN settings are rejected too.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<(), NetError> {
        let bad = |msg: &str| Err(NetError::Config(msg.to_string()));
        if !(self.mse_goal > 0.0) {
            return bad("mse_goal must be positive");
        }
        if !(self.mu_init > 0.0) {
            return bad("mu_init must be positive");
        }
        if !(self.mu_decrease > 0.0 && self.mu_decrease < 1.0) {
            return bad("mu_decrease must lie in (0, 1)");
        }
        if !(self.mu_increase > 1.0) {
            return bad("mu_increase must exceed 1");
        }
        if !(self.mu_max >= self.mu_init) {
            return bad("mu_max must be at least mu_init");
        }
        if !(self.min_gradient >= 0.0) {
            return bad("min_gradient must be non-negative");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    GoalMet,
    MaxEpochs,
    MuOverflow,
    GradientVanished,
}

impl StopReason {
    pub fn as_str(self) -> &'static str {
        match self {
            StopReason::GoalMet => "GoalMet",
            StopReason::MaxEpochs => "MaxEpochs",
            StopReason::MuOverflow => "MuOverflow",
            StopReason::GradientVanished => "GradientVanished",
        }
    }
}

impl std::fmt::Display for StopReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    pub final_mse: f64,
    pub epochs_run: usize,
    pub stop_reason: StopReason,
    /// Entry 0 is the error of the initial parameters; entry `k` the error
    /// after the `k`-th accepted step.
    pub mse_history: Vec<f64>,
}

fn residuals<I: AsRef<[f64]>>(net: &Network, features: &[I], targets: &[f64]) -> DVector<f64> {
    DVector::from_iterator(
        targets.len(),
        features
            .iter()
            .zip(targets)
            .map(|(x, &t)| t - net.forward(x.as_ref())),
    )
}

fn mean_square(r: &DVector<f64>) -> f64 {
    r.norm_squared() / r.len() as f64
}

/// Full-batch Levenberg-Marquardt on the squared error between `targets` and
/// the network outputs.
///
/// Each epoch solves `(J^T J + mu I) delta = J^T r` with `r = targets - outputs`.
/// A step is kept only if it lowers the error, after which `mu` shrinks by
/// `mu_decrease`; otherwise the parameters are restored, `mu` grows by
/// `mu_increase` and the epoch retries. A factorization failure counts as a
/// rejected step. If `mu` exceeds `mu_max` before any damped system of the
/// epoch could be factorized the result is [`NetError::SingularSystem`].
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn lm_train<I: AsRef<[f64]>>(
    net: &mut Network,
    features: &[I],
    targets: &[f64],
    config: &TrainConfig,
) -> Result<TrainReport, NetError> {
    config.validate()?;
    if features.is_empty() {
        return Err(NetError::Data("no training vectors".into()));
    }
    if features.len() != targets.len() {
        return Err(NetError::Data(format!(
            "{} feature vectors but {} targets",
            features.len(),
            targets.len()
        )));
    }
    if let Some(bad) = features.iter().position(|x| x.as_ref().len() != net.input_dim()) {
        return Err(NetError::Data(format!(
            "feature vector {bad} has {} values, the network expects {}",
            features[bad].as_ref().len(),
            net.input_dim()
        )));
    }
    if let Some(t) = targets.iter().find(|t| !(t.abs() < 1.0)) {
        return Err(NetError::Data(format!("target {t} is outside (-1, 1)")));
    }

    let params = net.param_count();
    let mut mu = config.mu_init;
    let mut r = residuals(net, features, targets);
    let mut mse = mean_square(&r);
    let mut history = vec![mse];
    let mut epochs = 0;

    let stop_reason = loop {
        if mse <= config.mse_goal {
            break StopReason::GoalMet;
        }
        if epochs >= config.max_epochs {
            break StopReason::MaxEpochs;
        }
        let jac = net.jacobian(features);
        let gradient = jac.tr_mul(&r);
        if gradient.amax() < config.min_gradient {
            break StopReason::GradientVanished;
        }
        let normal = jac.tr_mul(&jac);
        let start = net.params();

        let mut factorized = false;
        let accepted = loop {
            if mu > config.mu_max {
                break false;
            }
            let damped = &normal + DMatrix::<f64>::identity(params, params) * mu;
            let Some(chol) = damped.cholesky() else {
                mu *= config.mu_increase;
                continue;
            };
            factorized = true;
            let delta = chol.solve(&gradient);
            let candidate: Vec<f64> = start.iter().zip(delta.iter()).map(|(p, d)| p + d).collect();
            if net.set_params(&candidate).is_ok() {
                let trial = residuals(net, features, targets);
                let trial_mse = mean_square(&trial);
                if trial_mse < mse {
                    r = trial;
                    mse = trial_mse;
                    mu = (mu * config.mu_decrease).max(MU_FLOOR);
                    break true;
                }
            }
            net.set_params(&start).expect("restoring previous parameters");
            mu *= config.mu_increase;
        };

        if !accepted {
            if !factorized {
                return Err(NetError::SingularSystem {
                    mu_max: config.mu_max,
                });
            }
            break StopReason::MuOverflow;
        }
        epochs += 1;
        history.push(mse);
    };

    Ok(TrainReport {
        final_mse: mse,
        epochs_run: epochs,
        stop_reason,
        mse_history: history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::init_network;

    #[test]
    fn exact_fit_stops_immediately() {
        let mut net = init_network(4);
        let xs = vec![vec![0.1, 0.2, 0.3, 0.1, 0.2, 0.1], vec![0.0, 0.5, 0.1, 0.1, 0.2, 0.1]];
        let ts: Vec<f64> = xs.iter().map(|x| net.forward(x)).collect();
        let before = net.clone();
        let report = lm_train(&mut net, &xs, &ts, &TrainConfig::default()).unwrap();
        assert_eq!(report.stop_reason, StopReason::GoalMet);
        assert_eq!(report.epochs_run, 0);
        assert_eq!(report.mse_history, vec![0.0]);
        assert_eq!(net, before);
    }

    #[test]
    fn zero_epochs() {
        let mut net = init_network(4);
        let xs = vec![vec![0.5; 6]];
        let config = TrainConfig {
            max_epochs: 0,
            mse_goal: 1e-6,
            ..TrainConfig::default()
        };
        let report = lm_train(&mut net, &xs, &[0.8], &config).unwrap();
        assert_eq!(report.stop_reason, StopReason::MaxEpochs);
        assert_eq!(report.epochs_run, 0);
        assert_eq!(report.final_mse, report.mse_history[0]);
    }

    #[test]
    fn rejects_bad_inputs() {
        let mut net = init_network(0);
        let xs = vec![vec![0.5; 6]];
        let cfg = TrainConfig::default();
        assert!(matches!(lm_train(&mut net, &xs, &[1.0], &cfg), Err(NetError::Data(_))));
        assert!(matches!(
            lm_train(&mut net, &Vec::<Vec<f64>>::new(), &[], &cfg),
            Err(NetError::Data(_))
        ));
        assert!(matches!(
            lm_train(&mut net, &[vec![0.5; 5]], &[0.0], &cfg),
            Err(NetError::Data(_))
        ));
        let bad = TrainConfig {
            mu_decrease: 2.0,
            ..TrainConfig::default()
        };
        assert!(matches!(lm_train(&mut net, &xs, &[0.0], &bad), Err(NetError::Config(_))));
    }

    #[test]
    fn fits_a_single_point() {
        let mut net = init_network(9);
        let config = TrainConfig {
            mse_goal: 1e-10,
            ..TrainConfig::default()
        };
        let report = lm_train(&mut net, &[vec![0.2; 6]], &[0.6], &config).unwrap();
        assert_eq!(report.stop_reason, StopReason::GoalMet);
        assert!(report.mse_history.windows(2).all(|w| w[1] <= w[0]));
    }
}
