// Safe code only; nothing should be counted.
fn sum(values: &[i32]) -> i32 {
    values.iter().sum()
}

fn main() {
    let v = vec![1, 2, 3];
    let text = "unsafe { not code }";
    println!("{} {}", sum(&v), text);
}
