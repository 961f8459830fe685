/// Mixes a base seed with a sequence of tags into an independent stream seed.
pub fn derive_seed(seed: u64, tags: &[u64]) -> u64 {
    let mut state = splitmix(seed ^ 0x9e37_79b9_7f4a_7c15);
    for &tag in tags {
        state = splitmix(state ^ splitmix(tag.wrapping_add(0x632b_e59b_d9b4_e019)));
    }
    state
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
