use pkeet::hashing::random_message;
use pkeet::{AuthTrapdoor, Error, Params, Sampler, Scheme};

fn paper62() -> Scheme {
    Scheme::validated(Params::preset("paper62").unwrap()).unwrap()
}

#[test]
fn roundtrip_and_noise_margin() {
    let scheme = paper62();
    let ring = scheme.ring();
    let mut s = Sampler::from_seed(11);
    let (pk, sk) = scheme.setup(&mut s).unwrap();
    let quarter = scheme.params().quarter_q();
    for i in 0..20 {
        let m = if i == 0 { ring.zero() } else { random_message(ring, &mut s) };
        let ct = scheme.encrypt(&pk, &m, &mut s).unwrap();
        let d = scheme.decrypt_with_noise(&sk, &pk, &ct, &mut s).unwrap();
        assert_eq!(d.message, m);
        assert!(d.max_noise < quarter);
    }
}

#[test]
fn zero_message_has_no_shift() {
    let scheme = paper62();
    let ring = scheme.ring();
    let mut s = Sampler::from_seed(12);
    let (pk, sk) = scheme.setup(&mut s).unwrap();
    let ct = scheme.encrypt(&pk, &ring.zero(), &mut s).unwrap();
    // CT1 = u s1 + e1 with no message term: every coefficient of CT1 - CT3^T x
    // is small.
    let d = scheme.decrypt_with_noise(&sk, &pk, &ct, &mut s).unwrap();
    assert!(d.message.is_zero());
}

#[test]
fn tampering_and_wrong_key_reject() {
    let scheme = paper62();
    let ring = scheme.ring();
    let mut s = Sampler::from_seed(13);
    let (pk, sk) = scheme.setup(&mut s).unwrap();
    let (pk2, sk2) = scheme.setup(&mut s).unwrap();
    let m = random_message(ring, &mut s);
    let ct = scheme.encrypt(&pk, &m, &mut s).unwrap();

    let mut tampered = ct.clone();
    let mut c = tampered.ct2.coeffs().to_vec();
    c[5] = (c[5] + scheme.params().half_q()) % ring.q();
    tampered.ct2 = ring.from_coeffs(c).unwrap();
    assert!(matches!(scheme.decrypt(&sk, &pk, &tampered, &mut s), Err(Error::Reject)));

    assert!(matches!(scheme.decrypt(&sk2, &pk2, &ct, &mut s), Err(Error::Reject)));
}

#[test]
fn all_tests_agree() {
    let scheme = paper62();
    let ring = scheme.ring();
    let mut s = Sampler::from_seed(14);
    let (pk_i, sk_i) = scheme.setup(&mut s).unwrap();
    let (pk_j, sk_j) = scheme.setup(&mut s).unwrap();
    let m = random_message(ring, &mut s);
    let other = random_message(ring, &mut s);
    let ct_i = scheme.encrypt(&pk_i, &m, &mut s).unwrap();
    let ct_j = scheme.encrypt(&pk_j, &m, &mut s).unwrap();
    let ct_k = scheme.encrypt(&pk_j, &other, &mut s).unwrap();

    let t1 = (scheme.td1(&sk_i, &pk_i), scheme.td1(&sk_j, &pk_j));
    assert!(scheme.test1(&t1.0, &t1.1, &ct_i, &ct_j, &mut s).unwrap());
    assert!(scheme.test1(&t1.0, &t1.0, &ct_i, &ct_i, &mut s).unwrap());
    assert!(!scheme.test1(&t1.0, &t1.1, &ct_i, &ct_k, &mut s).unwrap());

    let t2i = scheme.td2(&sk_i, &pk_i, &ct_i, &mut s).unwrap();
    let t2j = scheme.td2(&sk_j, &pk_j, &ct_j, &mut s).unwrap();
    let t2k = scheme.td2(&sk_j, &pk_j, &ct_k, &mut s).unwrap();
    let before = s.preimage_calls();
    assert!(scheme.test2(&t2i, &t2j, &ct_i, &ct_j).unwrap());
    assert!(!scheme.test2(&t2i, &t2k, &ct_i, &ct_k).unwrap());
    assert_eq!(s.preimage_calls(), before);

    let t3i = scheme.td3_i(&sk_i, &pk_i, &ct_i, &mut s).unwrap();
    let t3j = scheme.td3_j(&sk_j, &pk_j);
    let before = s.preimage_calls();
    assert!(scheme.test3(&t3i, &t3j, &ct_i, &ct_j, &mut s).unwrap());
    assert_eq!(s.preimage_calls(), before + 1);
    assert!(scheme.test3(&t3j, &t3i, &ct_j, &ct_i, &mut s).unwrap());
    assert!(!scheme.test3(&t3i, &t3j, &ct_i, &ct_k, &mut s).unwrap());

    let AuthTrapdoor::Type3J(u) = &t3j else { panic!() };
    assert_eq!(u.trapdoor, sk_j.t_b);
}
