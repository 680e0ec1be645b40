struct Slot<T> {
    raw: *mut u8,
}

enum Tagged<'a, U> {
    Empty,
}

fn bump(raw: *mut u8) {
    unsafe {
        *raw += 1;
    }
}

fn main() {
    let mut byte = 3u8;
    bump(&mut byte);
    println!("{}", byte);
}
