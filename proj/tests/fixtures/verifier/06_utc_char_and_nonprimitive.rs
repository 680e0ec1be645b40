fn main() {
    let code = 65u32;
    let c = code as char;
    let d = 66u32 as char;
    let bytes = 0u8 as Vec<u8>;
    let s = &0u8 as &str;
    println!("{} {} {:?} {}", c, d, bytes, s);
}
