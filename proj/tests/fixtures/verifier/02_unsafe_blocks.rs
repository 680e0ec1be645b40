fn first(values: &[i32]) -> i32 {
    let p = values.as_ptr();
    unsafe {
        *p
    }
}

fn second(values: &[i32]) -> i32 {
    let p = values.as_ptr();
    let x = unsafe { *p.add(1) };
    x
}

fn main() {
    let v = [4, 5, 6];
    println!("{}", first(&v) + second(&v));
}
