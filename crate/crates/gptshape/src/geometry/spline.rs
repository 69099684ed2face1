//! Periodic cubic spline interpolation of closed planar curves.

/// Solves a cyclic tridiagonal system `A m = rhs` where `A` has diagonals
/// `(sub, diag, sup)` and corner couplings `A[0][n-1] = sub[0]`,
/// `A[n-1][0] = sup[n-1]`. Sherman-Morrison on top of the Thomas algorithm.
fn solve_cyclic_tridiagonal(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    assert!(n >= 3);
    let gamma = -diag[0];
    let mut d = diag.to_vec();
    d[0] -= gamma;
    d[n - 1] -= sub[0] * sup[n - 1] / gamma;

    let thomas = |d: &[f64], b: &[f64]| -> Vec<f64> {
        let mut c = vec![0.0; n];
        let mut x = vec![0.0; n];
        c[0] = sup[0] / d[0];
        x[0] = b[0] / d[0];
        for i in 1..n {
            let m = d[i] - sub[i] * c[i - 1];
            if i < n - 1 {
                c[i] = sup[i] / m;
            }
            x[i] = (b[i] - sub[i] * x[i - 1]) / m;
        }
        for i in (0..n - 1).rev() {
            x[i] -= c[i] * x[i + 1];
        }
        x
    };

    let x = thomas(&d, rhs);
    let mut u = vec![0.0; n];
    u[0] = gamma;
    u[n - 1] = sup[n - 1];
    let z = thomas(&d, &u);
    // v = (1, sub[0]/gamma) at positions (0, n-1)
    let vx = x[0] + sub[0] * x[n - 1] / gamma;
    let vz = 1.0 + z[0] + sub[0] * z[n - 1] / gamma;
    x.iter().zip(&z).map(|(xi, zi)| xi - vx * zi / vz).collect()
}

/// Periodic `C^2` cubic spline through `n` distinct points, parametrized by
/// cumulative chord length with period `period`.
pub struct PeriodicSpline {
    knots: Vec<f64>,
    points: Vec<[f64; 2]>,
    /// Second derivatives at the knots, per coordinate.
    m: Vec<[f64; 2]>,
    period: f64,
}

impl PeriodicSpline {
    /// Fits through `points` interpreted as a closed loop (last connects back
    /// to first). Points must be pairwise distinct consecutively.
    pub fn fit(points: &[[f64; 2]]) -> Self {
        let n = points.len();
        assert!(n >= 3, "need at least 3 points for a periodic spline");
        let mut knots = vec![0.0; n + 1];
        for i in 0..n {
            let j = (i + 1) % n;
            let dx = points[j][0] - points[i][0];
            let dy = points[j][1] - points[i][1];
            let h = (dx * dx + dy * dy).sqrt();
            assert!(h > 0.0, "consecutive duplicate point at index {i}");
            knots[i + 1] = knots[i] + h;
        }
        let period = knots[n];

        let h = |i: usize| knots[i + 1] - knots[i];
        let mut sub = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut sup = vec![0.0; n];
        let mut rhs_x = vec![0.0; n];
        let mut rhs_y = vec![0.0; n];
        for i in 0..n {
            let prev = (i + n - 1) % n;
            let next = (i + 1) % n;
            let hp = h(prev);
            let hi = h(i);
            sub[i] = hp / 6.0;
            diag[i] = (hp + hi) / 3.0;
            sup[i] = hi / 6.0;
            let slope_next = [
                (points[next][0] - points[i][0]) / hi,
                (points[next][1] - points[i][1]) / hi,
            ];
            let slope_prev = [
                (points[i][0] - points[prev][0]) / hp,
                (points[i][1] - points[prev][1]) / hp,
            ];
            rhs_x[i] = slope_next[0] - slope_prev[0];
            rhs_y[i] = slope_next[1] - slope_prev[1];
        }
        let mx = solve_cyclic_tridiagonal(&sub, &diag, &sup, &rhs_x);
        let my = solve_cyclic_tridiagonal(&sub, &diag, &sup, &rhs_y);
        let m = mx.iter().zip(&my).map(|(&a, &b)| [a, b]).collect();

        Self {
            knots,
            points: points.to_vec(),
            m,
            period,
        }
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    fn locate(&self, t: f64) -> (usize, usize, f64, f64) {
        let n = self.points.len();
        let mut t = t % self.period;
        if t < 0.0 {
            t += self.period;
        }
        // knots are sorted; binary search for the segment
        let seg = match self
            .knots
            .binary_search_by(|k| k.partial_cmp(&t).unwrap())
        {
            Ok(i) => i.min(n - 1),
            Err(i) => i - 1,
        };
        let h = self.knots[seg + 1] - self.knots[seg];
        (seg, (seg + 1) % n, t - self.knots[seg], h)
    }

    pub fn eval(&self, t: f64) -> [f64; 2] {
        let (i, j, dt, h) = self.locate(t);
        let a = (h - dt) / h;
        let b = dt / h;
        let mut out = [0.0; 2];
        for c in 0..2 {
            out[c] = a * self.points[i][c]
                + b * self.points[j][c]
                + ((a * a * a - a) * self.m[i][c] + (b * b * b - b) * self.m[j][c]) * h * h / 6.0;
        }
        out
    }

    pub fn deriv(&self, t: f64) -> [f64; 2] {
        let (i, j, dt, h) = self.locate(t);
        let a = (h - dt) / h;
        let b = dt / h;
        let mut out = [0.0; 2];
        for c in 0..2 {
            out[c] = (self.points[j][c] - self.points[i][c]) / h
                + ((3.0 * b * b - 1.0) * self.m[j][c] - (3.0 * a * a - 1.0) * self.m[i][c]) * h
                    / 6.0;
        }
        out
    }

    pub fn deriv2(&self, t: f64) -> [f64; 2] {
        let (i, j, dt, h) = self.locate(t);
        let a = (h - dt) / h;
        let b = dt / h;
        [
            a * self.m[i][0] + b * self.m[j][0],
            a * self.m[i][1] + b * self.m[j][1],
        ]
    }

    fn speed(&self, t: f64) -> f64 {
        let d = self.deriv(t);
        d[0].hypot(d[1])
    }

    /// Cumulative arclength table sampled at `samples_per_seg` subintervals per
    /// knot segment (composite Simpson), plus total length.
    pub fn arclength_table(&self, samples_per_seg: usize) -> (Vec<f64>, Vec<f64>) {
        let n = self.points.len();
        let mut ts = Vec::with_capacity(n * samples_per_seg + 1);
        let mut ss = Vec::with_capacity(n * samples_per_seg + 1);
        ts.push(0.0);
        ss.push(0.0);
        let mut acc = 0.0;
        for seg in 0..n {
            let t0 = self.knots[seg];
            let t1 = self.knots[seg + 1];
            let dt = (t1 - t0) / samples_per_seg as f64;
            for k in 0..samples_per_seg {
                let a = t0 + k as f64 * dt;
                let b = a + dt;
                let mid = 0.5 * (a + b);
                let len =
                    dt / 6.0 * (self.speed(a) + 4.0 * self.speed(mid) + self.speed(b.min(t1)));
                acc += len;
                ts.push(b);
                ss.push(acc);
            }
        }
        (ts, ss)
    }

    /// Parameter value at which the arclength from `t = 0` equals `s`.
    pub fn param_at_arclength(&self, s: f64, table: &(Vec<f64>, Vec<f64>)) -> f64 {
        let (ts, ss) = table;
        let total = *ss.last().unwrap();
        let s = s.clamp(0.0, total);
        let idx = match ss.binary_search_by(|v| v.partial_cmp(&s).unwrap()) {
            Ok(i) => return ts[i],
            Err(i) => i,
        };
        let (s0, s1) = (ss[idx - 1], ss[idx]);
        let (t0, t1) = (ts[idx - 1], ts[idx]);
        let mut t = t0 + (t1 - t0) * (s - s0) / (s1 - s0);
        // Newton refinement on s(t) - s = 0 using ds/dt = speed
        for _ in 0..4 {
            let frac = (t - t0) / (t1 - t0);
            let s_here = s0 + (s1 - s0) * frac;
            // local linear estimate of accumulated length correction
            let err = s_here - s;
            let sp = self.speed(t);
            if sp <= 0.0 {
                break;
            }
            t -= err / sp;
            t = t.clamp(t0, t1);
        }
        t
    }
}
