//! Accuracy of expressions and networks, and their agreement.

use rayon::prelude::*;

use crate::dataset::Dataset;
use crate::diffnet::{ClampMode, Network};
use crate::encoding::Encoding;
use crate::error::Result;
use crate::matcher::soiretm;
use crate::soire::Soire;

/// Counts behind an evaluation.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct EvalReport {
    pub accuracy: f64,
    pub faithfulness: Option<f64>,
    pub matched_positives: usize,
    pub rejected_negatives: usize,
    pub agreements: Option<usize>,
    pub total: usize,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Fraction of samples whose label `r` reproduces.
pub fn accuracy(r: &Soire, data: &Dataset) -> f64 {
    evaluate(r, data).accuracy
}

pub fn evaluate(r: &Soire, data: &Dataset) -> EvalReport {
    let verdicts: Vec<bool> = data.samples.par_iter().map(|s| soiretm(r, &s.text)).collect();
    report(data, &verdicts)
}

fn report(data: &Dataset, verdicts: &[bool]) -> EvalReport {
    let mut matched_positives = 0;
    let mut rejected_negatives = 0;
    for (s, &v) in data.samples.iter().zip(verdicts) {
        match (s.label, v) {
            (true, true) => matched_positives += 1,
            (false, false) => rejected_negatives += 1,
            _ => {}
        }
    }
    EvalReport {
        accuracy: ratio(matched_positives + rejected_negatives, data.len()),
        faithfulness: None,
        matched_positives,
        rejected_negatives,
        agreements: None,
        total: data.len(),
    }
}

/// Thresholded network predictions (exact clamping).
pub fn network_predictions(theta: &Encoding, data: &Dataset, threshold: f64) -> Result<Vec<bool>> {
    let net = Network::new(theta, ClampMode::Exact);
    data.samples
        .par_iter()
        .map(|s| net.forward(&s.text).map(|t| t.y_hat() >= threshold))
        .collect()
}

pub fn network_accuracy(theta: &Encoding, data: &Dataset, threshold: f64) -> Result<f64> {
    Ok(report(data, &network_predictions(theta, data, threshold)?).accuracy)
}

/// Fraction of strings on which the thresholded network and `r` agree.
pub fn faithfulness(theta: &Encoding, r: &Soire, data: &Dataset, threshold: f64) -> Result<f64> {
    Ok(full_report(theta, r, data, threshold)?.faithfulness.unwrap_or(0.0))
}

/// Accuracy of `r` together with its agreement with the network of `theta`.
pub fn full_report(theta: &Encoding, r: &Soire, data: &Dataset, threshold: f64) -> Result<EvalReport> {
    let net = network_predictions(theta, data, threshold)?;
    let verdicts: Vec<bool> = data.samples.par_iter().map(|s| soiretm(r, &s.text)).collect();
    let agreements = net.iter().zip(&verdicts).filter(|(a, b)| a == b).count();
    let mut out = report(data, &verdicts);
    out.agreements = Some(agreements);
    out.faithfulness = Some(ratio(agreements, data.len()));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Sample;
    use crate::Alphabet;

    fn data() -> Dataset {
        let sigma = Alphabet::parse("ab").unwrap();
        Dataset::new(
            sigma,
            vec![
                Sample::new("a", true),
                Sample::new("ab", true),
                Sample::new("b", false),
                Sample::new("ba", false),
            ],
        )
    }

    #[test]
    fn accuracy_examples() {
        let d = data();
        let sigma = d.alphabet.clone();
        assert_eq!(accuracy(&Soire::parse("ab?", &sigma).unwrap(), &d), 1.0);
        assert_eq!(accuracy(&Soire::parse("a*&b*", &sigma).unwrap(), &d), 0.5);
        // "a" and "b" are right, "ab" is missed, "ba" is rejected.
        let r = Soire::parse("a|b", &sigma).unwrap();
        let rep = evaluate(&r, &d);
        assert_eq!((rep.matched_positives, rep.rejected_negatives), (1, 1));
        assert_eq!(rep.accuracy, 0.5);
        assert_eq!(accuracy(&Soire::parse("a", &sigma).unwrap(), &d), 0.75);
    }

    #[test]
    fn order_does_not_matter() {
        let mut d = data();
        let r = Soire::parse("a|b", &d.alphabet).unwrap();
        let before = accuracy(&r, &d);
        d.samples.reverse();
        assert_eq!(accuracy(&r, &d), before);
    }

    #[test]
    fn faithful_network_agrees_with_its_decoding() {
        let d = data();
        let r = Soire::parse("ab?", &d.alphabet).unwrap();
        let theta = Encoding::encode(&r, 6).unwrap();
        assert_eq!(faithfulness(&theta, &r, &d, 0.5).unwrap(), 1.0);
        assert_eq!(network_accuracy(&theta, &d, 0.5).unwrap(), 1.0);
        let other = Soire::parse("(ab?)?", &d.alphabet).unwrap();
        // Disagrees only on the empty string, which is absent.
        assert_eq!(faithfulness(&theta, &other, &d, 0.5).unwrap(), 1.0);
    }
}
