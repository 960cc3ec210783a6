use super::OracleError;
use crate::engine::EngineError;
use crate::graph::Network;

/// `Ĩ_1` and its gradient with respect to the black initialization.
#[derive(Debug, Clone, PartialEq)]
pub struct InfectionRateTime1 {
    pub value: f64,
    pub grad_black: Vec<f64>,
}

fn super_sums(net: &Network, values: &[f64]) -> Vec<f64> {
    (0..net.node_count())
        .map(|i| net.closed_neighborhood(i).iter().map(|&j| values[j]).sum())
        .collect()
}

fn validate(
    net: &Network,
    red: &[f64],
    black: &[f64],
) -> Result<(Vec<f64>, Vec<f64>), OracleError> {
    let n = net.node_count();
    for (what, v) in [("initial red", red), ("initial black", black)] {
        if v.len() != n {
            return Err(EngineError::LengthMismatch {
                what,
                got: v.len(),
                expected: n,
            }
            .into());
        }
        if let Some(node) = v.iter().position(|x| !(x.is_finite() && *x >= 0.0)) {
            return Err(EngineError::InvalidMass {
                what,
                node: node + 1,
                value: v[node],
            }
            .into());
        }
    }
    let red_bar = super_sums(net, red);
    if let Some(i) = red_bar.iter().position(|&r| r <= 0.0) {
        return Err(OracleError::NoRedMass(i + 1));
    }
    Ok((red_bar, super_sums(net, black)))
}

/// Closed form `Ĩ_1 = (1/N) Σ_i R̄_i / (R̄_i + B̄_i)` with
/// `∂Ĩ_1/∂B_j = -(1/N) Σ_{i ∈ N'(j)} R̄_i / (R̄_i + B̄_i)²`.
///
/// Requires `R̄_i > 0` for every node, which keeps the function convex and
/// finite on the whole budget simplex.
pub fn infection_rate_time1(
    net: &Network,
    red: &[f64],
    black: &[f64],
) -> Result<InfectionRateTime1, OracleError> {
    let (red_bar, black_bar) = validate(net, red, black)?;
    let n = net.node_count() as f64;
    let mut value = 0.0;
    let mut sensitivity = Vec::with_capacity(red_bar.len());
    for (r, b) in red_bar.iter().zip(&black_bar) {
        let total = r + b;
        value += r / total;
        sensitivity.push(r / (total * total));
    }
    // ∂/∂B_j touches exactly the super urns i with j ∈ N'(i), i.e. i ∈ N'(j).
    let grad_black = (0..net.node_count())
        .map(|j| {
            -net.closed_neighborhood(j)
                .iter()
                .map(|&i| sensitivity[i])
                .sum::<f64>()
                / n
        })
        .collect();
    Ok(InfectionRateTime1 {
        value: value / n,
        grad_black,
    })
}

/// `∂Ĩ_1/∂R_j = (1/N) Σ_{i ∈ N'(j)} B̄_i / (R̄_i + B̄_i)²`.
pub fn infection_rate_time1_red_gradient(
    net: &Network,
    red: &[f64],
    black: &[f64],
) -> Result<Vec<f64>, OracleError> {
    let (red_bar, black_bar) = validate(net, red, black)?;
    let n = net.node_count() as f64;
    let sensitivity: Vec<f64> = red_bar
        .iter()
        .zip(&black_bar)
        .map(|(r, b)| b / ((r + b) * (r + b)))
        .collect();
    Ok((0..net.node_count())
        .map(|j| {
            net.closed_neighborhood(j)
                .iter()
                .map(|&i| sensitivity[i])
                .sum::<f64>()
                / n
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p3_fixture() {
        let net = Network::path(3);
        let r = infection_rate_time1(&net, &[1.0; 3], &[1.0, 0.0, 1.0]).unwrap();
        assert!((r.value - 29.0 / 45.0).abs() < 1e-15);
        // -(1/3)(2/9 + 3/25 + 2/9) = -127/675
        assert!((r.grad_black[1] + 127.0 / 675.0).abs() < 1e-15);
    }

    #[test]
    fn uniform_is_one_half() {
        let net = Network::star(4);
        let r = infection_rate_time1(&net, &[3.0; 5], &[3.0; 5]).unwrap();
        assert!((r.value - 0.5).abs() < 1e-15);
    }

    #[test]
    fn zero_red_super_urn_rejected() {
        let net = Network::path(2);
        assert_eq!(
            infection_rate_time1(&net, &[0.0, 0.0], &[1.0, 1.0]),
            Err(OracleError::NoRedMass(1))
        );
    }
}
