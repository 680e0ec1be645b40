#[repr(packed)]
struct Header {
    tag: u8,
    size: u32,
}

fn main() {
    let h = Header { tag: 1, size: 512 };
    let r = &h.size;
    let p = &h as *const Header;
    let t = unsafe { (*p).tag };
    let s = unsafe { &(*p).size };
    let u = (*p).tag;
    println!("{} {} {} {}", r, t, s, u);
}
