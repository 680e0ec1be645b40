#![deny(unsafe_code)]

/* a block comment mentioning unsafe { *p } and
   /* a nested comment with unsafe fn f() { } */
   still inside the outer comment */

fn describe<'a>(label: &'a str) -> &'a str {
    // unsafe { this is a line comment }
    let raw = r#"unsafe { "quoted" }"#;
    let bytes = b"unsafe {";
    let brace = '{';
    let r#unsafe = raw.len() + bytes.len();
    let _ = (brace, r#unsafe);
    label
}

fn main() {
    println!("{}", describe("unsafe"));
}
