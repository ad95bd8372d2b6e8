use num_complex::Complex64;

/// Neumaier-compensated complex summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct ComplexSum {
    sum: Complex64,
    comp: Complex64,
}

fn step(sum: &mut f64, comp: &mut f64, x: f64) {
    let t = *sum + x;
    if sum.abs() >= x.abs() {
        *comp += (*sum - t) + x;
    } else {
        *comp += (x - t) + *sum;
    }
    *sum = t;
}

impl ComplexSum {
    pub fn add(&mut self, z: Complex64) {
        step(&mut self.sum.re, &mut self.comp.re, z.re);
        step(&mut self.sum.im, &mut self.comp.im, z.im);
    }

    pub fn value(&self) -> Complex64 {
        self.sum + self.comp
    }
}

impl FromIterator<Complex64> for ComplexSum {
    fn from_iter<I: IntoIterator<Item = Complex64>>(iter: I) -> Self {
        let mut s = ComplexSum::default();
        for z in iter {
            s.add(z);
        }
        s
    }
}

/// Compensated real sum.
pub(crate) fn real_sum(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter()
        .map(|x| Complex64::new(x, 0.0))
        .collect::<ComplexSum>()
        .value()
        .re
}
