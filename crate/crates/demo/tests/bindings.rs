use trajgram_demo::Demo;

fn walkthrough() -> Demo {
    Demo::new("walkthrough", 0, 0, 0, 0, 0).unwrap()
}

#[test]
fn slice_answer() {
    assert_eq!(walkthrough().time_slice(7, 3, 10, 4, 10), vec![2, 9, 4, 5, 7, 3]);
}

#[test]
fn nearest_answer() {
    assert_eq!(walkthrough().knn(10, 0, 9, 1), vec![2.0, 10f64.sqrt()]);
}

#[test]
fn trajectory_answer() {
    assert_eq!(walkthrough().trajectory(2, 8, 11).unwrap(), vec![8, 10, 3, 9, 9, 3, 10, 9, 4, 11, 10, 4]);
}

#[test]
fn synthetic_build() {
    let demo = Demo::new("routes", 3, 40, 300, 128, 30).unwrap();
    assert_eq!((demo.side(), demo.instants()), (128, 300));
    assert!(demo.summary().contains("objects: 40"));
    assert_eq!(demo.time_slice(0, 0, 127, 127, 299).len() % 3, 0);
}
