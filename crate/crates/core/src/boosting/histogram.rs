use super::loss::GradientPair;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BinStats {
    pub g: f64,
    pub h: f64,
    pub count: usize,
}

/// Gradient statistics of one feature over one node's instances.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub bins: Vec<BinStats>,
}

impl Histogram {
    pub fn zeros(bins: usize) -> Self {
        Self {
            bins: vec![BinStats::default(); bins],
        }
    }

    pub fn total(&self) -> BinStats {
        self.bins.iter().fold(BinStats::default(), |acc, b| BinStats {
            g: acc.g + b.g,
            h: acc.h + b.h,
            count: acc.count + b.count,
        })
    }

    pub fn populated(&self) -> usize {
        self.bins.iter().filter(|b| b.count > 0).count()
    }
}

/// Accumulates `(g, h, count)` per bin of `column` over `instances`.
pub fn build_histogram(column: &[u8], bins: usize, instances: &[usize], gradients: &[GradientPair]) -> Histogram {
    let mut hist = Histogram::zeros(bins);
    for &i in instances {
        let b = &mut hist.bins[column[i] as usize];
        b.g += gradients[i].g;
        b.h += gradients[i].h;
        b.count += 1;
    }
    hist
}
