fn main() {
    for (n, m, e) in [(17usize, 10usize, 6usize), (17, 12, 4), (17, 14, 10), (17, 16, 8), (9, 8, 4), (13, 4, 6)] {
        let t0 = std::time::Instant::now();
        let r = evencycles::base::pack_complete_graph_uniform(n, m, e, 0, 1);
        match r {
            Ok(p) => println!("K_{n} m={m} e={e}: ok, {} cycles, {:?}", p.cycles().len(), t0.elapsed()),
            Err(err) => println!("K_{n} m={m} e={e}: FAILED {err} after {:?}", t0.elapsed()),
        }
    }
}
