#include <gtest/gtest.h>

#include "oracles.hpp"
#include "secagg/commitment.hpp"
#include "secagg/crypto.hpp"
#include "secagg/shamir.hpp"

using namespace secagg;

namespace {

Bytes kat_root() { return sha256(to_bytes("kat-root")); }

TEST(DeriveSeed, PinnedChain) {
  Bytes root = kat_root();
  EXPECT_EQ(to_hex(root),
            "e81bfee2a1c4d0e9a632e9e9f52e44787c67de0006e17e92132172305544320d");
  EXPECT_EQ(to_hex(derive_seed(root, "label")),
            "667d907acd271eaed26fc5c0c94060fb084dfbf0a18b2f1483cfe3522a66749e");
  EXPECT_EQ(to_hex(derive_seed(root, "label", 7)),
            "7b9bcaec1bd4c6f98ada7e49b71737d134d20185f7f124106a41f620dda0740c");
}

TEST(DeriveSeed, LabelsAndIndicesSeparate) {
  Bytes root = kat_root();
  EXPECT_NE(derive_seed(root, "a"), derive_seed(root, "b"));
  EXPECT_NE(derive_seed(root, "a", 0), derive_seed(root, "a", 1));
  EXPECT_NE(derive_seed(root, "a"), derive_seed(sha256(root), "a"));
}

TEST(KeyAgreement, SymmetricWithContextSeparation) {
  KaKeyPair a = ka_gen(derive_seed(kat_root(), "ka.a"));
  KaKeyPair b = ka_gen(derive_seed(kat_root(), "ka.b"));
  Bytes prg_ab = ka_derive("prg", a.sk, b.pk);
  Bytes prg_ba = ka_derive("prg", b.sk, a.pk);
  Bytes enc_ab = ka_derive("enc", a.sk, b.pk);
  EXPECT_EQ(prg_ab, prg_ba);
  EXPECT_EQ(enc_ab, ka_derive("enc", b.sk, a.pk));
  EXPECT_NE(prg_ab, enc_ab);
  EXPECT_EQ(to_hex(prg_ab),
            "e3b7ed9ce72dc43a6c4c6bd18b383deae82e7c73eebcc53b945927b582d00474");
  EXPECT_EQ(to_hex(enc_ab),
            "a6afc795d5fb34b2c38ebf67257f0f96fe87bb8160acc4b10f6039036ef80df9");
}

TEST(KeyAgreement, SelfKeyIsWellDefined) {
  // A committee member masks its own input with the key it "shares with
  // itself"; this must be an ordinary derivation, not a special case.
  KaKeyPair a = ka_gen(derive_seed(kat_root(), "ka.self"));
  Bytes k1 = ka_derive("prg", a.sk, a.pk);
  EXPECT_EQ(k1, ka_derive("prg", a.sk, a.pk));
  EXPECT_EQ(k1.size(), 32u);
}

TEST(KeyAgreement, RejectsBadInputs) {
  KaKeyPair a = ka_gen(derive_seed(kat_root(), "ka.a"));
  EXPECT_THROW(ka_derive("mac", a.sk, a.pk), std::invalid_argument);
  EXPECT_THROW(ka_derive("prg", mpz_class(0), a.pk), std::invalid_argument);
  EXPECT_THROW(ka_derive("prg", group().q(), a.pk), std::invalid_argument);
  // 5 is a non-residue mod p, so it lies outside the order-q subgroup.
  EXPECT_THROW(ka_derive("prg", a.sk, mpz_class(5)), std::invalid_argument);
  EXPECT_THROW(ka_derive("prg", a.sk, mpz_class(0)), std::invalid_argument);
}

TEST(Prg, PinnedExpansion) {
  Bytes key = sha256(to_bytes("prg-kat"));
  EXPECT_EQ(prg_expand(key, 4, 1000003),
            (std::vector<uint64_t>{93106, 789798, 320793, 501385}));
  EXPECT_EQ(prg_expand(key, 4, 0),
            (std::vector<uint64_t>{10849519825937025521ull,
                                   14750339739934380324ull,
                                   6359859675772417795ull,
                                   3195550717997996529ull}));
  EXPECT_EQ(mpz_to_bytes_be(prg_expand_scalars(key, 2)[0], 32),
            from_hex("5842c2addbbef7032c58e0728001c916"
                     "1147c9235643a371d17fcec5728b0169"));
}

TEST(Prg, PrefixStability) {
  // Streams are prefix-stable: expanding to a longer length must not change
  // earlier values (mask sums depend on this when m varies across tests).
  Bytes key = sha256(to_bytes("prg-prefix"));
  auto a = prg_expand(key, 5, 1000003);
  auto b = prg_expand(key, 50, 1000003);
  for (size_t i = 0; i < a.size(); i++) EXPECT_EQ(a[i], b[i]);
}

TEST(Prg, UniformOverSmallModulus) {
  // 64 bins, 1<<16 draws; critical value chi2(0.999, df=63) = 103.4424.
  Bytes key = sha256(to_bytes("prg-uniform"));
  auto draws = prg_expand(key, size_t(1) << 16, 64);
  std::vector<uint64_t> bins(64, 0);
  for (uint64_t d : draws) {
    ASSERT_LT(d, 64u);
    bins[d]++;
  }
  std::vector<double> expect(64, 1.0 / 64.0);
  EXPECT_LT(oracle::chi_square(bins, expect), 103.4424);
}

TEST(Prg, ModulusPathBoundaries) {
  Bytes key = sha256(to_bytes("prg-paths"));
  uint64_t m32 = uint64_t(1) << 32;  // widest 4-byte-draw modulus
  for (uint64_t v : prg_expand(key, 64, m32)) EXPECT_LT(v, m32);
  for (uint64_t v : prg_expand(key, 64, m32 + 1)) EXPECT_LT(v, m32 + 1);
  // Heavy rejection: modulus just above 2^63 rejects half of all draws.
  uint64_t m63 = (uint64_t(1) << 63) + 1;
  auto a = prg_expand(key, 64, m63);
  EXPECT_EQ(a, prg_expand(key, 64, m63));
  for (uint64_t v : a) EXPECT_LT(v, m63);
  EXPECT_THROW(prg_expand(key, 0, 1000003), std::invalid_argument);
}

TEST(AuthEnc, RoundtripPinnedAndTamperRejected) {
  Bytes key = sha256(to_bytes("ae-kat"));
  Bytes nonce = ae_nonce(2, 5, 11);
  EXPECT_EQ(to_hex(nonce), "5e85c9c33a7f994baa3c82f0");
  Bytes pt = to_bytes("attack at dawn");
  Bytes ct = ae_encrypt(key, nonce, pt);
  EXPECT_EQ(to_hex(ct),
            "7cd4b266ea62e2c09d0be192845d24b38d643dd69fea0fe34b9a114f0555");
  ASSERT_EQ(ae_decrypt(key, nonce, ct), pt);
  for (size_t i : {size_t(0), ct.size() / 2, ct.size() - 1}) {
    Bytes bad = ct;
    bad[i] ^= 1;
    EXPECT_FALSE(ae_decrypt(key, nonce, bad).has_value()) << "byte " << i;
  }
  EXPECT_FALSE(ae_decrypt(key, ae_nonce(2, 5, 12), ct).has_value());
  Bytes key2 = key;
  key2[0] ^= 1;
  EXPECT_FALSE(ae_decrypt(key2, nonce, ct).has_value());
  EXPECT_THROW(ae_decrypt(key, nonce, Bytes(kAeadTagLen - 1, 0)),
               std::invalid_argument);
  Bytes empty_ct = ae_encrypt(key, nonce, Bytes{});
  EXPECT_EQ(ae_decrypt(key, nonce, empty_ct), Bytes{});
}

TEST(AuthEnc, NoncesSeparateDirectionsAndRounds) {
  EXPECT_NE(ae_nonce(2, 5, 11), ae_nonce(2, 11, 5));
  EXPECT_NE(ae_nonce(2, 5, 11), ae_nonce(3, 5, 11));
  EXPECT_EQ(ae_nonce(2, 5, 11).size(), kAeadNonceLen);
}

TEST(Signatures, PinnedSignVerifyAndTamper) {
  SigKeyPair s = ds_gen(derive_seed(kat_root(), "ds"));
  EXPECT_EQ(to_hex(s.pk),
            "3364e29a5f5ace1ffbb8fb78f42955efa71c20b93e19b2c5ba3e1a66995fc150");
  Bytes msg = to_bytes("message");
  Bytes sig = ds_sign(s.sk, msg);
  EXPECT_EQ(to_hex(sig),
            "c4a163ec8af2dc3d3b3d2b4bf434e150122429d06a90cfdd7ebc2f80cf67969c"
            "7b5280172e45a58cbefd299125d669bcb47414d79135313f563a630904382c04");
  EXPECT_TRUE(ds_verify(s.pk, sig, msg));
  Bytes sig2 = sig;
  sig2[10] ^= 1;
  EXPECT_FALSE(ds_verify(s.pk, sig2, msg));
  EXPECT_FALSE(ds_verify(s.pk, sig, to_bytes("messagf")));
  SigKeyPair other = ds_gen(derive_seed(kat_root(), "ds2"));
  EXPECT_FALSE(ds_verify(other.pk, sig, msg));
  EXPECT_FALSE(ds_verify(Bytes(31, 0), sig, msg));   // malformed pk
  EXPECT_FALSE(ds_verify(s.pk, Bytes(63, 0), msg));  // malformed sig
}

TEST(Shamir, PinnedToyFieldAndAllSubsets) {
  PrimeField f257{mpz_class(257)};
  auto shares = ss_share(f257, 129, 3, 5, derive_seed(kat_root(), "ss"));
  std::vector<uint64_t> pinned{149, 141, 105, 41, 206};
  ASSERT_EQ(shares.size(), 5u);
  for (size_t i = 0; i < 5; i++) {
    EXPECT_EQ(shares[i].index, i + 1);
    EXPECT_EQ(shares[i].value, mpz_class(pinned[i]));
  }
  // every 3-subset reconstructs; every superset agrees
  for (size_t a = 0; a < 5; a++)
    for (size_t b = a + 1; b < 5; b++)
      for (size_t c = b + 1; c < 5; c++) {
        std::vector<Share> sub{shares[a], shares[b], shares[c]};
        EXPECT_EQ(ss_recon(f257, sub, 3), mpz_class(129));
      }
  EXPECT_EQ(ss_recon(f257, shares, 3), mpz_class(129));
}

TEST(Shamir, ScalarFieldReconstruction) {
  const PrimeField& fq = group().scalar_field();
  mpz_class secret = fq.reduce(mpz_from_bytes_be(sha256(to_bytes("sec"))));
  auto shares = ss_share(fq, secret, 4, 7, derive_seed(kat_root(), "ss-q"));
  for (size_t drop1 = 0; drop1 < 7; drop1++)
    for (size_t drop2 = drop1 + 1; drop2 < 7; drop2++)
      for (size_t drop3 = drop2 + 1; drop3 < 7; drop3++) {
        std::vector<Share> sub;
        for (size_t i = 0; i < 7; i++)
          if (i != drop1 && i != drop2 && i != drop3) sub.push_back(shares[i]);
        EXPECT_EQ(ss_recon(fq, sub, 4), secret);
      }
}

TEST(Shamir, ThresholdMinusOneSharesRevealNothing) {
  // With t=2, one fixed share is consistent with EVERY possible secret:
  // as the second share's value sweeps the field, reconstruction sweeps a
  // bijection of the field.
  PrimeField f257{mpz_class(257)};
  auto shares = ss_share(f257, 77, 2, 3, derive_seed(kat_root(), "ss-hide"));
  std::set<mpz_class> seen;
  for (uint64_t v = 0; v < 257; v++) {
    std::vector<Share> pair{shares[0], Share{2, mpz_class(v)}};
    seen.insert(ss_recon(f257, pair, 2));
  }
  EXPECT_EQ(seen.size(), 257u);
}

TEST(Shamir, InterpolationChecksConsistency) {
  const PrimeField& fq = group().scalar_field();
  auto shares = ss_share(fq, 12345, 3, 6, derive_seed(kat_root(), "ss-i"));
  std::vector<Share> base{shares[0], shares[2], shares[4]};
  EXPECT_EQ(ss_interpolate(fq, base, 2), shares[1].value);
  EXPECT_EQ(ss_interpolate(fq, base, 6), shares[5].value);
  Share forged{6, fq.add(shares[5].value, 1)};
  EXPECT_NE(ss_interpolate(fq, base, 6), forged.value);
  EXPECT_THROW(ss_interpolate(fq, base, 3), std::invalid_argument);
  EXPECT_THROW(ss_interpolate(fq, {}, 1), std::invalid_argument);
}

TEST(Shamir, RejectsMalformedInputs) {
  PrimeField f257{mpz_class(257)};
  EXPECT_THROW(ss_share(f257, 1, 0, 5, kat_root()), std::invalid_argument);
  EXPECT_THROW(ss_share(f257, 1, 6, 5, kat_root()), std::invalid_argument);
  EXPECT_THROW(ss_share(f257, 257, 2, 3, kat_root()), std::invalid_argument);
  EXPECT_THROW(ss_share(f257, 1, 2, 300, kat_root()), std::invalid_argument);
  auto shares = ss_share(f257, 1, 2, 3, kat_root());
  EXPECT_THROW(ss_recon(f257, {shares[0]}, 2), std::invalid_argument);
  EXPECT_THROW(ss_recon(f257, {shares[0], shares[0]}, 2),
               std::invalid_argument);
  EXPECT_THROW(ss_recon(f257, {shares[0], Share{0, 1}}, 2),
               std::invalid_argument);
}

TEST(Commitment, PinnedHomomorphicAndBindingChecks) {
  const PrimeField& fq = group().scalar_field();
  mpz_class c = comm_gen(42, 1337);
  EXPECT_EQ(mpz_to_bytes_be(c, 33),
            from_hex("00370a10b757ea8b213d9e80df9367911f"
                     "6bdb5b708cef04b8951623ad2b918ba2"));
  EXPECT_TRUE(comm_vfy(c, 42, 1337));
  EXPECT_FALSE(comm_vfy(c, 43, 1337));
  EXPECT_FALSE(comm_vfy(c, 42, 1338));
  EXPECT_FALSE(comm_vfy(mpz_class(5), 42, 1337));  // not a subgroup element

  mpz_class a = fq.reduce(mpz_from_bytes_be(sha256(to_bytes("m1"))));
  mpz_class b = fq.reduce(mpz_from_bytes_be(sha256(to_bytes("m2"))));
  mpz_class r = fq.reduce(mpz_from_bytes_be(sha256(to_bytes("r1"))));
  mpz_class s = fq.reduce(mpz_from_bytes_be(sha256(to_bytes("r2"))));
  EXPECT_EQ(comm_mul(comm_gen(a, r), comm_gen(b, s)),
            comm_gen(fq.add(a, b), fq.add(r, s)));
  EXPECT_EQ(comm_gen(0, 0), comm_identity());
  EXPECT_THROW(comm_gen(fq.modulus(), 0), std::invalid_argument);
  EXPECT_THROW(comm_gen(0, fq.modulus()), std::invalid_argument);
}

TEST(Group, SafePrimeStructure) {
  const Group& G = group();
  EXPECT_EQ(G.p(), (mpz_class(1) << 256) + 230191);
  EXPECT_EQ(G.p(), 2 * G.q() + 1);
  EXPECT_GE(mpz_probab_prime_p(G.p().get_mpz_t(), 40), 1);
  EXPECT_GE(mpz_probab_prime_p(G.q().get_mpz_t(), 40), 1);
  EXPECT_EQ(G.exp_g(G.q()), mpz_class(1));  // g generates the q-subgroup
  EXPECT_TRUE(G.is_element(G.h()));
  EXPECT_NE(G.h(), G.g());
  EXPECT_NE(G.h(), G.identity());
  EXPECT_FALSE(G.is_element(mpz_class(5)));  // non-residue mod p
  EXPECT_FALSE(G.is_element(mpz_class(0)));
  EXPECT_FALSE(G.is_element(G.p()));
  // encode/decode round-trips and enforces membership
  EXPECT_EQ(G.decode_element(G.encode_element(G.h())), G.h());
  EXPECT_THROW(G.decode_element(mpz_to_bytes_be(mpz_class(5), 33)),
               std::invalid_argument);
}

}  // namespace
