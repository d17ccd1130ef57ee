use num_complex::Complex64;
fn main() {
    let pts = [(0.5,0.0),(3.2,0.0),(11.0,0.0),(13.0,0.0),(25.0,0.0),(49.5,0.0),(2.0,1.5),(15.0,4.0),(8.0,8.0)];
    for (re,im) in pts {
        let z = Complex64::new(re,im);
        let j0 = helmholtz::specfun::bessel_j(0,z);
        let j1 = helmholtz::specfun::bessel_j(1,z);
        let y0 = helmholtz::specfun::bessel_y(0,z).unwrap();
        let y1 = helmholtz::specfun::bessel_y(1,z).unwrap();
        println!("{re} {im} {:.16e} {:.16e} {:.16e} {:.16e} {:.16e} {:.16e} {:.16e} {:.16e}", j0.re,j0.im,j1.re,j1.im,y0.re,y0.im,y1.re,y1.im);
    }
}
