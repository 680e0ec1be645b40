unsafe fn read(p: *const u8) -> u8 {
    *p
}

fn main() {
    let x = 7u8;
    let p = &x as *const u8;
    let a = *p;
    let b = *p + 1;
    let c = read(p);
    println!("{} {} {}", a, b, c);
}
