use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use pkeet::codec;
use pkeet::hashing::decode_message;
use pkeet::{Params, Sampler, Scheme};
use tempfile::TempDir;

fn pkeet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pkeet"))
        .args(args)
        .env_remove("PKEET_SEED")
        .output()
        .expect("spawn pkeet")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

struct Dir(TempDir);

impl Dir {
    fn new() -> Self {
        Self(tempfile::tempdir().unwrap())
    }

    fn path(&self, name: &str) -> PathBuf {
        self.0.path().join(name)
    }

    fn s(&self, name: &str) -> String {
        self.path(name).to_string_lossy().into_owned()
    }

    fn keygen(&self, tag: &str, seed: &str) {
        let out = pkeet(&[
            "keygen", "--preset", "paper62", "--seed", seed,
            "--out-pk", &self.s(&format!("{tag}.pk")),
            "--out-sk", &self.s(&format!("{tag}.sk")),
        ]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    }

    fn message(&self, name: &str, fill: u8) {
        fs::write(self.path(name), vec![fill; 128]).unwrap();
    }

    fn encrypt(&self, tag: &str, msg: &str, ct: &str) {
        let out = pkeet(&[
            "encrypt", "--pk", &self.s(&format!("{tag}.pk")), "--in", &self.s(msg), "--out", &self.s(ct),
        ]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    }

    fn td(&self, tag: &str, kind: &str, ct: Option<&str>, out_name: &str) -> Output {
        let pk = self.s(&format!("{tag}.pk"));
        let sk = self.s(&format!("{tag}.sk"));
        let out = self.s(out_name);
        let mut args = vec!["td", "--type", kind, "--sk", &sk, "--pk", &pk, "--out", &out];
        let ct_path;
        if let Some(c) = ct {
            ct_path = self.s(c);
            args.extend(["--ct", &ct_path]);
        }
        pkeet(&args)
    }

    fn test(&self, kind: &str, td_i: &str, td_j: &str, ct_i: &str, ct_j: &str) -> Output {
        pkeet(&[
            "test", "--type", kind,
            "--td-i", &self.s(td_i), "--td-j", &self.s(td_j),
            "--ct-i", &self.s(ct_i), "--ct-j", &self.s(ct_j),
        ])
    }
}

fn scheme() -> Scheme {
    Scheme::validated(Params::preset("paper62").unwrap()).unwrap()
}

#[test]
fn keygen_is_seeded_and_sized() {
    let d = Dir::new();
    d.keygen("a", "5");
    d.keygen("b", "5");
    d.keygen("c", "6");
    let read = |p: &Path| fs::read(p).unwrap();
    assert_eq!(read(&d.path("a.pk")), read(&d.path("b.pk")));
    assert_eq!(read(&d.path("a.sk")), read(&d.path("b.sk")));
    assert_ne!(read(&d.path("a.pk")), read(&d.path("c.pk")));
    // n (2m + 1) log q bits of payload.
    assert_eq!(read(&d.path("a.pk")).len() - codec::HEADER_LEN, 1024 * 129 * 62 / 8);
}

#[test]
fn environment_seed_overrides_flag() {
    let d = Dir::new();
    let run = |seed_flag: &str, pk: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_pkeet"))
            .args(["keygen", "--preset", "paper62", "--seed", seed_flag, "--out-pk", &d.s(pk), "--out-sk", &d.s("x.sk")])
            .env("PKEET_SEED", "42")
            .output()
            .unwrap();
        assert_eq!(code(&out), 0);
    };
    run("1", "e1.pk");
    run("2", "e2.pk");
    assert_eq!(fs::read(d.path("e1.pk")).unwrap(), fs::read(d.path("e2.pk")).unwrap());
}

#[test]
fn roundtrip_matches_library() {
    let d = Dir::new();
    d.keygen("u", "7");
    d.message("m", 0xa5);
    d.encrypt("u", "m", "ct");
    let out = pkeet(&[
        "decrypt", "--pk", &d.s("u.pk"), "--sk", &d.s("u.sk"), "--in", &d.s("ct"), "--out", &d.s("m2"),
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(fs::read(d.path("m")).unwrap(), fs::read(d.path("m2")).unwrap());

    let scheme = scheme();
    let pk = codec::decode_public_key(&scheme, &fs::read(d.path("u.pk")).unwrap()).unwrap();
    let sk = codec::decode_secret_key(&scheme, &fs::read(d.path("u.sk")).unwrap()).unwrap();
    let ct = codec::decode_ciphertext(&scheme, &fs::read(d.path("ct")).unwrap()).unwrap();
    let m = scheme.decrypt(&sk, &pk, &ct, &mut Sampler::from_seed(0)).unwrap();
    assert_eq!(m, decode_message(scheme.ring(), &[0xa5; 128]).unwrap());
}

#[test]
fn failure_exit_codes() {
    let d = Dir::new();
    let out = pkeet(&["keygen", "--preset", "nope", "--out-pk", &d.s("p"), "--out-sk", &d.s("s")]);
    assert_eq!(code(&out), 2);
    let out = pkeet(&["keygen", "--preset", "toy17", "--out-pk", &d.s("p"), "--out-sk", &d.s("s")]);
    assert_eq!(code(&out), 2);
    let out = pkeet(&["keygen", "--preset", "toy17", "--allow-insecure", "--out-pk", &d.s("p"), "--out-sk", &d.s("s")]);
    assert_eq!(code(&out), 0);
    let out = pkeet(&["keygen", "--out-pk", &d.s("missing/dir/p"), "--out-sk", &d.s("s")]);
    assert_eq!(code(&out), 3);

    d.keygen("u", "1");
    d.keygen("v", "2");
    d.message("m", 0x3c);
    d.encrypt("u", "m", "ct");

    let bytes = fs::read(d.path("ct")).unwrap();
    for cut in [0, 10, codec::HEADER_LEN, bytes.len() / 2, bytes.len() - 1] {
        fs::write(d.path("cut"), &bytes[..cut]).unwrap();
        let out = pkeet(&["decrypt", "--pk", &d.s("u.pk"), "--sk", &d.s("u.sk"), "--in", &d.s("cut"), "--out", &d.s("o")]);
        assert_eq!(code(&out), 3, "cut at {cut}");
    }
    fs::write(d.path("short"), [0u8; 5]).unwrap();
    let out = pkeet(&["encrypt", "--pk", &d.s("u.pk"), "--in", &d.s("short"), "--out", &d.s("o")]);
    assert_eq!(code(&out), 3);

    let out = pkeet(&["decrypt", "--pk", &d.s("v.pk"), "--sk", &d.s("v.sk"), "--in", &d.s("ct"), "--out", &d.s("o")]);
    assert_eq!(code(&out), 4);

    let out = pkeet(&["decrypt", "--pk", &d.s("u.pk"), "--sk", &d.s("u.pk"), "--in", &d.s("ct"), "--out", &d.s("o")]);
    assert_eq!(code(&out), 3);
}

#[test]
fn trapdoors_and_tests() {
    let d = Dir::new();
    d.keygen("i", "11");
    d.keygen("j", "12");
    d.message("m", 0x17);
    d.message("other", 0x71);
    d.encrypt("i", "m", "ct_i");
    d.encrypt("j", "m", "ct_j");
    d.encrypt("j", "other", "ct_k");

    for (tag, kind, ct, name) in [
        ("i", "1", None, "t1_i"),
        ("j", "1", None, "t1_j"),
        ("i", "2", Some("ct_i"), "t2_i"),
        ("j", "2", Some("ct_j"), "t2_j"),
        ("j", "2", Some("ct_k"), "t2_k"),
        ("i", "3i", Some("ct_i"), "t3_i"),
        ("j", "3j", None, "t3_j"),
    ] {
        let out = d.td(tag, kind, ct, name);
        assert_eq!(code(&out), 0, "{name}: {}", String::from_utf8_lossy(&out.stderr));
    }

    let verdict = |out: &Output| String::from_utf8_lossy(&out.stdout).trim().to_string();
    for (kind, ti, tj) in [("1", "t1_i", "t1_j"), ("2", "t2_i", "t2_j"), ("3", "t3_i", "t3_j")] {
        let out = d.test(kind, ti, tj, "ct_i", "ct_j");
        assert_eq!((code(&out), verdict(&out)), (0, "EQUAL".to_string()), "type {kind}");
    }
    let out = d.test("3", "t3_j", "t3_i", "ct_j", "ct_i");
    assert_eq!(code(&out), 0);

    let out = d.test("1", "t1_i", "t1_j", "ct_i", "ct_k");
    assert_eq!((code(&out), verdict(&out)), (1, "NOT-EQUAL".to_string()));
    let out = d.test("2", "t2_i", "t2_k", "ct_i", "ct_k");
    assert_eq!(code(&out), 1);

    assert_eq!(code(&d.test("1", "t1_i", "t2_j", "ct_i", "ct_j")), 2);
    assert_eq!(code(&d.test("3", "t3_i", "t3_i", "ct_i", "ct_i")), 2);
    assert_eq!(code(&d.test("2", "t2_i", "t2_k", "ct_i", "ct_j")), 2);
    assert_eq!(code(&d.td("i", "2", None, "x")), 2);
}
