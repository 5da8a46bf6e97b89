fn main() {
    println!("cvnet");
}
