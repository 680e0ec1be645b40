use std::ffi::c_int;

extern "C" {
    fn abs(x: c_int) -> c_int;
}

struct Wrapper(*mut u8);
unsafe impl Send for Wrapper {}

unsafe trait Marker { unsafe fn mark(&self); }

pub unsafe fn outer(p: *mut u8) -> u8 {
    let v = *p;
    unsafe {
        *p = v + 1;
    }
    *p
}

fn main() {
    let mut byte = 1u8;
    let w = Wrapper(&mut byte);
    let total = unsafe { outer(w.0) } + unsafe { abs(-3) as u8 };
    unsafe { let a = abs(-4); let b = abs(-5); println!("{} {} {}", total, a, b); }
}
