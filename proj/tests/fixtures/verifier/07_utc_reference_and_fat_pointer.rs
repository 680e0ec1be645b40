fn main() {
    let x = 9u8;
    let a = &x as u32;
    let p = std::ptr::null::<u8>();
    let q = p as *const [u8];
    let f = 1.5f32;
    let r = &f as i64;
    unsafe {
        println!("{} {:?} {}", a, q, r);
    }
}
