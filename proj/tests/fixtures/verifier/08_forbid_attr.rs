#![forbid(unsafe_code)]
//! Crate that promises no unsafe code.

fn halve(values: &mut [u32]) {
    for v in values.iter_mut() {
        *v /= 2;
    }
}

fn main() {
    let mut v = vec![8, 6, 4];
    halve(&mut v);
    println!("{:?}", v);
}
