use rand::Rng;

use super::{check_slot, HybridEvaluator};
use crate::distributions::joint::{sample_joint, JointDistribution};
use crate::distributions::source::{draw_many, ExampleSource};
use crate::distributions::stream::{label, RandomnessStream};
use crate::domain::point::Sign;
use crate::error::{Error, Result};
use crate::estimators::{Moments, RateReport};
use crate::exec;
use crate::refuters::{Refuter, Verdict};

/// Structure rate with `noise_slots` leading noise pairs and m − noise_slots
/// structured pairs, no planting. Evaluation e uses `rs.child(e)`.
pub fn unplanted_rate(
    refuter: &dyn Refuter,
    source: &dyn ExampleSource,
    noise_slots: usize,
    evaluations: usize,
    rs: &RandomnessStream,
) -> Result<RateReport> {
    let m = refuter.sample_size();
    if noise_slots > m {
        return Err(Error::Argument(format!("{noise_slots} noise slots exceed m = {m}")));
    }
    let noise = JointDistribution::rademacher(source.marginal().clone());
    let hits = exec::try_map_range(evaluations, |e| -> Result<bool> {
        let ers = rs.child(e as u64);
        let mut sample = Vec::with_capacity(m);
        if noise_slots > 0 {
            sample.extend(sample_joint(&noise, &ers.child(label::NOISE), noise_slots)?);
        }
        sample.extend(draw_many(source, &ers.child(label::STRUCTURED), m - noise_slots)?);
        Ok(refuter.decide(&sample, &ers.child(label::REFUTER))?.verdict == Verdict::Structure)
    })?;
    Ok(RateReport::new(hits.iter().filter(|&&h| h).count() as u64, evaluations as u64))
}

/// (w0, wend): Structure rates on m structured pairs and on m noise pairs.
pub fn endpoint_rates(
    refuter: &dyn Refuter,
    source: &dyn ExampleSource,
    trials: usize,
    rs: &RandomnessStream,
) -> Result<(RateReport, RateReport)> {
    if trials < 100 {
        return Err(Error::Argument(format!("endpoint rates need at least 100 trials, got {trials}")));
    }
    let w0 = unplanted_rate(refuter, source, 0, trials, &rs.child(0))?;
    let wend = unplanted_rate(refuter, source, refuter.sample_size(), trials, &rs.child(1))?;
    Ok((w0, wend))
}

/// Â_i: W_{i,y}(x) with (x, y) drawn from the source.
pub fn planted_structured_rate(ev: &HybridEvaluator, slot: usize, evaluations: usize, rs: &RandomnessStream) -> Result<Moments> {
    check_slot(slot, ev.m())?;
    let bits = exec::try_map_range(evaluations, |e| -> Result<f64> {
        let ers = rs.child(e as u64);
        let ex = ev.source().draw(&ers.child(label::POINTS))?;
        Ok(ev.eval_w(slot, &ex.point, ex.label, &ers.child(label::CONTEXTS))? as u8 as f64)
    })?;
    Ok(Moments::from_values(&bits))
}

/// B̂_i: W_{i,b}(x) with x ∼ 𝒟 and b a fair coin.
pub fn planted_noise_rate(ev: &HybridEvaluator, slot: usize, evaluations: usize, rs: &RandomnessStream) -> Result<Moments> {
    check_slot(slot, ev.m())?;
    let bits = exec::try_map_range(evaluations, |e| -> Result<f64> {
        let ers = rs.child(e as u64);
        let mut rng = ers.child(label::POINTS).rng();
        let x = ev.source().marginal().draw(&mut rng);
        let b = Sign::from_bool(rng.gen_bool(0.5));
        Ok(ev.eval_w(slot, &x, b, &ers.child(label::CONTEXTS))? as u8 as f64)
    })?;
    Ok(Moments::from_values(&bits))
}

/// Ê[y·h_i(x)] over source draws, h smoothed over `k` contexts.
pub fn label_correlation(ev: &HybridEvaluator, slot: usize, k: usize, evaluations: usize, rs: &RandomnessStream) -> Result<Moments> {
    check_slot(slot, ev.m())?;
    let terms = exec::try_map_range(evaluations, |e| -> Result<f64> {
        let ers = rs.child(e as u64);
        let ex = ev.source().draw(&ers.child(label::POINTS))?;
        Ok(ex.label.as_f64() * ev.eval_h(slot, &ex.point, k, &ers.child(label::CONTEXTS))?)
    })?;
    Ok(Moments::from_values(&terms))
}
