// scratch: tip via the reverse Loewner ODE dz/ds = -2/(z - W(T-s))
use loewner::driving::make_chordal_sle0;
use num_complex::Complex64 as C64;

fn main() {
    let drive = make_chordal_sle0(-5.0, 1.0).unwrap();
    for frac in [1e-4f64, 1e-6, 1e-8] {
        let t_end = drive.horizon * (1.0 - frac);
        for y0 in [1e-3f64, 1e-4, 1e-5] {
            let w_end = drive.value(t_end).unwrap();
            let mut z = C64::new(w_end, y0);
            let mut s = 0.0;
            while s < t_end {
                let f = |s_: f64, z_: C64| -2.0 / (z_ - drive.value(t_end - s_).unwrap());
                let gap = (z - drive.value(t_end - s).unwrap()).norm();
                let ds = (0.02 * gap * gap).min(t_end - s).min(1e-4).max(1e-16);
                let k1 = f(s, z);
                let k2 = f(s + 0.5 * ds, z + 0.5 * ds * k1);
                let k3 = f(s + 0.5 * ds, z + 0.5 * ds * k2);
                let k4 = f(s + ds, z + ds * k3);
                z += ds / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
                s += ds;
            }
            println!(
                "frac={frac:.0e} y0={y0:.0e}: tip {z:.5} err from x0 {:.5}",
                (z - C64::new(1.0, 0.0)).norm()
            );
        }
    }
}
