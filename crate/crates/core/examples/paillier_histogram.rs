//! One passive-party histogram under Paillier: encrypt gradients, sum them
//! per bin without decrypting, decrypt, and compare with plaintext.

use cmosb::boosting::{build_histogram, compute_gradients, quantile_binning, BinnedMatrix, LossKind};
use cmosb::data::SyntheticSpec;
use cmosb::fedproto::{
    aggregate_encrypted, decrypt_histograms, EncryptedGradients, HeContext, HeCostModel, Paillier, PartyView,
};

fn main() -> cmosb::Result<()> {
    let mut spec = SyntheticSpec::synthetic1(3);
    spec.instances = 200;
    let ds = spec.generate()?;
    let edges = quantile_binning(&ds, 32)?;
    let binned = BinnedMatrix::new(&ds, &edges);
    let scores = vec![0.0; ds.rows()];
    let grads = compute_gradients(ds.labels(), &scores, LossKind::Logistic, 2)?.remove(0);

    let mut he = HeContext::new(Paillier::generate(512, 3)?);
    let all: Vec<usize> = (0..ds.rows()).collect();
    let enc = EncryptedGradients::encrypt(&mut he, &grads, &all)?;
    let passive_cols = [5usize, 6];
    let view = PartyView {
        binned: &binned,
        edges: &edges,
        columns: &passive_cols,
    };
    let encrypted = aggregate_encrypted(&mut he, &view, &enc, &all)?;
    let hists = decrypt_histograms(&mut he, &encrypted)?;

    let mut worst: f64 = 0.0;
    for (f, h) in &hists {
        let plain = build_histogram(binned.column(*f), edges.feature_bins(*f), &all, &grads);
        for (a, b) in h.bins.iter().zip(&plain.bins) {
            worst = worst.max((a.g - b.g).abs()).max((a.h - b.h).abs());
        }
        println!("feature {f}: {} populated bins, G = {:.6}", h.populated(), h.total().g);
    }
    let c = he.counters();
    println!("max |encrypted - plaintext| = {worst:.3e}");
    println!(
        "counters enc={} dec={} add={}, modelled cost {:.3} s",
        c.enc,
        c.dec,
        c.add,
        HeCostModel::default().cost(&c)
    );
    Ok(())
}
