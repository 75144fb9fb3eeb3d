//! Lognormal model of the θ ensemble.

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::ensemble::{check_resamples, percentile_summary, BootstrapResult, Statistic};
use crate::error::{Error, Result};
use crate::resample;

const SQRT_2PI: f64 = 2.506_628_274_631_000_7;

/// Parameters of ln X ~ N(mu, s2).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LognormalFit {
    pub mu: f64,
    pub s2: f64,
    pub n: usize,
}

impl LognormalFit {
    pub fn s(&self) -> f64 {
        self.s2.sqrt()
    }
}

/// Closed-form maximum likelihood: mean and divisor-n variance of ln θ.
pub fn lognormal_mle(thetas: &[f64]) -> Result<LognormalFit> {
    if thetas.len() < 2 {
        return Err(Error::TooFewValues {
            required: 2,
            found: thetas.len(),
        });
    }
    if let Some(v) = thetas.iter().find(|v| !(**v > 0.0)) {
        return Err(Error::NonPositiveValue(*v));
    }
    let n = thetas.len() as f64;
    let logs: Vec<f64> = thetas.iter().map(|t| t.ln()).collect();
    let mu = logs.iter().sum::<f64>() / n;
    let s2 = logs.iter().map(|l| (l - mu) * (l - mu)).sum::<f64>() / n;
    Ok(LognormalFit {
        mu,
        s2,
        n: thetas.len(),
    })
}

pub fn lognormal_pdf(x: f64, fit: &LognormalFit) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::NonPositiveX(x));
    }
    if !(fit.s2 > 0.0) {
        return Err(Error::ZeroVariance);
    }
    let s = fit.s();
    let z = x.ln() - fit.mu;
    Ok((-z * z / (2.0 * fit.s2)).exp() / (x * s * SQRT_2PI))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LognormalStats {
    pub mean: f64,
    pub median: f64,
    pub p25: f64,
    pub p75: f64,
    pub variance: f64,
}

pub fn lognormal_quantile(fit: &LognormalFit, q: f64) -> f64 {
    (fit.mu + fit.s() * standard_normal_quantile(q)).exp()
}

pub fn lognormal_stats(fit: &LognormalFit) -> LognormalStats {
    let LognormalFit { mu, s2, .. } = *fit;
    LognormalStats {
        mean: (mu + s2 / 2.0).exp(),
        median: mu.exp(),
        p25: lognormal_quantile(fit, 0.25),
        p75: lognormal_quantile(fit, 0.75),
        variance: s2.exp_m1() * (2.0 * mu + s2).exp(),
    }
}

impl LognormalStats {
    pub fn get(&self, statistic: Statistic) -> f64 {
        match statistic {
            Statistic::Mean => self.mean,
            Statistic::Median => self.median,
            Statistic::P25 => self.p25,
            Statistic::P75 => self.p75,
            Statistic::Std => self.variance.sqrt(),
        }
    }
}

/// Draws `n` variates per resample from the fitted distribution and
/// summarises the statistic over `n_resamples` resamples. The point value
/// is the fitted distribution's own statistic.
pub fn parametric_bootstrap(
    fit: &LognormalFit,
    n: usize,
    n_resamples: usize,
    statistic: Statistic,
    seed: u64,
) -> Result<BootstrapResult> {
    if !(fit.s2 > 0.0) {
        return Err(Error::ZeroVariance);
    }
    if n < 2 {
        return Err(Error::TooFewValues {
            required: 2,
            found: n,
        });
    }
    check_resamples(n_resamples)?;
    let (mu, s) = (fit.mu, fit.s());
    let replicates = resample::replicate(seed, n_resamples, |rng, buffer| {
        buffer.clear();
        buffer.extend((0..n).map(|_| {
            let z: f64 = StandardNormal.sample(rng);
            (mu + s * z).exp()
        }));
        statistic.evaluate(buffer)
    });
    let point = lognormal_stats(fit).get(statistic);
    Ok(percentile_summary(statistic, point, replicates, seed))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityCurve {
    pub x: Vec<f64>,
    pub f: Vec<f64>,
}

/// Density on `points` equally spaced abscissae in (0, upper].
pub fn density_curve(fit: &LognormalFit, upper: f64, points: usize) -> Result<DensityCurve> {
    if !(upper > 0.0) || points == 0 {
        return Err(Error::InvalidParameter(
            "need upper > 0 and points > 0".into(),
        ));
    }
    let step = upper / points as f64;
    let x: Vec<f64> = (1..=points).map(|i| step * i as f64).collect();
    let f = x
        .iter()
        .map(|&x| lognormal_pdf(x, fit))
        .collect::<Result<_>>()?;
    Ok(DensityCurve { x, f })
}

/// Inverse of the standard normal CDF (Wichura's AS 241, PPND16), accurate
/// to about 1e-16 relative.
pub fn standard_normal_quantile(p: f64) -> f64 {
    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }
    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180625 - q * q;
        return q * poly(&A, r) / poly(&B, r);
    }
    let r = if q < 0.0 { p } else { 1.0 - p };
    let r = (-r.ln()).sqrt();
    let x = if r <= 5.0 {
        let r = r - 1.6;
        poly(&C, r) / poly(&D, r)
    } else {
        let r = r - 5.0;
        poly(&E, r) / poly(&F, r)
    };
    if q < 0.0 {
        -x
    } else {
        x
    }
}

fn poly(coefficients: &[f64; 8], x: f64) -> f64 {
    coefficients.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

const A: [f64; 8] = [
    3.387_132_872_796_366_5,
    1.331_416_678_917_843_8e2,
    1.971_590_950_306_551_3e3,
    1.373_169_376_550_946e4,
    4.592_195_393_154_987e4,
    6.726_577_092_700_87e4,
    3.343_057_558_358_813e4,
    2.509_080_928_730_122_7e3,
];
const B: [f64; 8] = [
    1.0,
    4.231_333_070_160_091e1,
    6.871_870_074_920_579e2,
    5.394_196_021_424_751e3,
    2.121_379_430_158_659_7e4,
    3.930_789_580_009_271e4,
    2.872_908_573_572_194_3e4,
    5.226_495_278_852_854e3,
];
const C: [f64; 8] = [
    1.423_437_110_749_683_5,
    4.630_337_846_156_546,
    5.769_497_221_460_691,
    3.647_848_324_763_204_5,
    1.270_458_252_452_368_4,
    2.417_807_251_774_506e-1,
    2.272_384_498_926_918_4e-2,
    7.745_450_142_783_414e-4,
];
const D: [f64; 8] = [
    1.0,
    2.053_191_626_637_759,
    1.676_384_830_183_803_8,
    6.897_673_349_851e-1,
    1.481_039_764_274_800_8e-1,
    1.519_866_656_361_645_7e-2,
    5.475_938_084_995_345e-4,
    1.050_750_071_644_416_9e-9,
];
const E: [f64; 8] = [
    6.657_904_643_501_103,
    5.463_784_911_164_114,
    1.784_826_539_917_291_3,
    2.965_605_718_285_048_7e-1,
    2.653_218_952_657_612_4e-2,
    1.242_660_947_388_078_4e-3,
    2.711_555_568_743_487_6e-5,
    2.010_334_399_292_288_1e-7,
];
const F: [f64; 8] = [
    1.0,
    5.998_322_065_558_88e-1,
    1.369_298_809_227_358e-1,
    1.487_536_129_085_061_5e-2,
    7.868_691_311_456_133e-4,
    1.846_318_317_510_054_8e-5,
    1.421_511_758_316_446e-7,
    2.044_263_103_389_939_7e-15,
];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::mean;

    const REFERENCE_FIT: LognormalFit = LognormalFit {
        mu: -2.87,
        s2: 0.48,
        n: 126,
    };

    /// Simpson's rule on the density after substituting x = e^y.
    fn integrate_density(fit: &LognormalFit) -> f64 {
        let s = fit.s();
        let (a, b) = (fit.mu - 12.0 * s, fit.mu + 12.0 * s);
        let n = 20_000;
        let h = (b - a) / n as f64;
        let g = |y: f64| {
            let x = y.exp();
            lognormal_pdf(x, fit).unwrap() * x
        };
        let mut sum = g(a) + g(b);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            sum += w * g(a + h * i as f64);
        }
        sum * h / 3.0
    }

    #[test]
    fn mle_by_hand() {
        let fit = lognormal_mle(&[(-3.0f64).exp(), (-2.0f64).exp()]).unwrap();
        assert!((fit.mu + 2.5).abs() < 1e-14);
        assert!((fit.s2 - 0.25).abs() < 1e-14);
        let fit = lognormal_mle(&[0.04; 7]).unwrap();
        assert!((fit.mu - 0.04f64.ln()).abs() < 1e-14);
        assert!(fit.s2.abs() < 1e-28);
    }

    #[test]
    fn mle_errors() {
        assert_eq!(
            lognormal_mle(&[0.1]),
            Err(Error::TooFewValues {
                required: 2,
                found: 1
            })
        );
        assert_eq!(
            lognormal_mle(&[0.1, 0.0]),
            Err(Error::NonPositiveValue(0.0))
        );
    }

    #[test]
    fn pdf_examples() {
        let f = lognormal_pdf(REFERENCE_FIT.mu.exp(), &REFERENCE_FIT).unwrap();
        let expected = 1.0 / (REFERENCE_FIT.mu.exp() * REFERENCE_FIT.s() * SQRT_2PI);
        assert!((f - expected).abs() < 1e-12 * expected);
        let f = lognormal_pdf(0.057, &REFERENCE_FIT).unwrap();
        assert!((f - 10.1).abs() < 0.05, "{f}");
        assert!((integrate_density(&REFERENCE_FIT) - 1.0).abs() < 1e-6);
        assert_eq!(
            lognormal_pdf(0.0, &REFERENCE_FIT),
            Err(Error::NonPositiveX(0.0))
        );
        let flat = LognormalFit {
            s2: 0.0,
            ..REFERENCE_FIT
        };
        assert_eq!(lognormal_pdf(0.1, &flat), Err(Error::ZeroVariance));
    }

    #[test]
    fn closed_form_stats() {
        let st = lognormal_stats(&REFERENCE_FIT);
        assert!((st.mean - 0.0721).abs() < 5e-5, "{}", st.mean);
        assert!((st.median - 0.0567).abs() < 5e-5);
        assert!((st.p25 - 0.0355).abs() < 5e-5, "{}", st.p25);
        assert!((st.p75 - 0.0905).abs() < 5e-5, "{}", st.p75);
        let prod = st.p25 * st.p75;
        let m2 = st.median * st.median;
        assert!((prod - m2).abs() <= 1e-12 * m2);
        let flat = lognormal_stats(&LognormalFit {
            s2: 0.0,
            ..REFERENCE_FIT
        });
        assert_eq!(flat.mean, flat.median);
        assert_eq!(flat.variance, 0.0);
    }

    #[test]
    fn normal_quantile_reference_values() {
        let cases = [
            (0.5, 0.0),
            (0.75, 0.674_489_750_196_081_7),
            (0.95, 1.644_853_626_951_472_7),
            (0.975, 1.959_963_984_540_054),
            (0.999, 3.090_232_306_167_813_5),
            (1e-10, -6.361_340_902_404_056),
        ];
        for (p, z) in cases {
            let got = standard_normal_quantile(p);
            assert!((got - z).abs() < 1e-9, "p={p}: {got} vs {z}");
            if p >= 1e-3 {
                assert!((standard_normal_quantile(1.0 - p) + got).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn mle_recovers_sampled_parameters() {
        let m = 100_000usize;
        let mut rng = resample::substream(11, 0);
        let (mu0, s0) = (-2.5, 0.6);
        let sample: Vec<f64> = (0..m)
            .map(|_| {
                let z: f64 = StandardNormal.sample(&mut rng);
                (mu0 + s0 * z).exp()
            })
            .collect();
        let fit = lognormal_mle(&sample).unwrap();
        let bound = 1.0 / (m as f64).sqrt();
        assert!((fit.mu - mu0).abs() < 3.0 * bound);
        assert!((fit.s2 - s0 * s0).abs() < 5.0 * bound);
    }

    #[test]
    fn closed_form_mean_matches_monte_carlo() {
        let mut rng = resample::substream(5, 1);
        let s = REFERENCE_FIT.s();
        let sample: Vec<f64> = (0..1_000_000)
            .map(|_| {
                let z: f64 = StandardNormal.sample(&mut rng);
                (REFERENCE_FIT.mu + s * z).exp()
            })
            .collect();
        let mc = mean(&sample);
        let exact = lognormal_stats(&REFERENCE_FIT).mean;
        assert!((mc - exact).abs() < 0.005 * exact);
    }

    #[test]
    fn parametric_bootstrap_behaviour() {
        let a = parametric_bootstrap(&REFERENCE_FIT, 126, 1000, Statistic::Median, 3).unwrap();
        assert_eq!(
            a,
            parametric_bootstrap(&REFERENCE_FIT, 126, 1000, Statistic::Median, 3).unwrap()
        );
        assert!(a.lo < a.point && a.point < a.hi);
        let tight = LognormalFit {
            s2: 1e-14,
            ..REFERENCE_FIT
        };
        let t = parametric_bootstrap(&tight, 126, 1000, Statistic::Mean, 3).unwrap();
        assert!((t.hi - t.lo) < 1e-6 * t.point);
        assert!((t.point - REFERENCE_FIT.mu.exp()).abs() < 1e-6);
        let flat = LognormalFit {
            s2: 0.0,
            ..REFERENCE_FIT
        };
        assert_eq!(
            parametric_bootstrap(&flat, 126, 1000, Statistic::Mean, 3),
            Err(Error::ZeroVariance)
        );
    }

    #[test]
    fn density_curve_covers_requested_range() {
        let c = density_curve(&REFERENCE_FIT, 0.3, 300).unwrap();
        assert_eq!(c.x.len(), 300);
        assert!((c.x[299] - 0.3).abs() < 1e-15);
        assert!(c.f.iter().all(|f| *f >= 0.0));
    }
}
