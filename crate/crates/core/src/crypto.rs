//! IND-CPA KEM and PKE over ideal LRPC codes.
//!
//! Secret key (x, y) with Supp(x) = Supp(y) = F of dimension d; public key
//! h = x⁻¹y mod P. A ciphertext is c = e₁ + e₂h with Supp(e₁) = Supp(e₂) = E
//! of dimension r, and the shared secret is G(E). Decapsulation computes the
//! syndrome x·c = x·e₁ + y·e₂ and recovers E by rank support recovery.
//!
//! G is SHAKE256 over a domain tag followed by the canonical encoding of E;
//! the KEM key is its first 32 output bytes and the PKE mask its first |M|.

use rand::Rng;
use sha3::digest::{ExtendableOutput, Update, XofReader};
use sha3::Shake256;

use crate::error::{domain, Error, Result};
use crate::expansion::rsr;
use crate::field::{pack_vector, packed_len, unpack_vector, ExtField};
use crate::params::ParamSet;
use crate::ring::{ring_add, ring_inv, ring_mul, IdealModulus};
use crate::subspace::{sample_full_support, sample_support_pair, Subspace};

pub const KEY_BYTES: usize = 32;
const G_DOMAIN: &[u8] = b"LRPC support hash v1";
const MAGIC: &[u8; 4] = b"LRPC";
const FORMAT_VERSION: u8 = 1;

pub type SharedKey = [u8; KEY_BYTES];

fn g_reader<F: ExtField>(field: &F, e: &Subspace<F::Elem>) -> impl XofReader {
    let mut h = Shake256::default();
    h.update(G_DOMAIN);
    h.update(&e.encode(field));
    h.finalize_xof()
}

/// G(E) truncated to 32 bytes.
pub fn canonical_support_hash<F: ExtField>(field: &F, e: &Subspace<F::Elem>) -> SharedKey {
    let mut k = [0u8; KEY_BYTES];
    g_reader(field, e).read(&mut k);
    k
}

/// G(E) truncated to `len` bytes.
pub fn support_keystream<F: ExtField>(field: &F, e: &Subspace<F::Elem>, len: usize) -> Vec<u8> {
    let mut out = vec![0u8; len];
    g_reader(field, e).read(&mut out);
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PublicKey<E> {
    pub h: Vec<E>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SecretKey<E> {
    pub x: Vec<E>,
    pub y: Vec<E>,
    /// Canonical basis of F = Supp(x).
    pub f_basis: Vec<E>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KeyPair<E> {
    pub pk: PublicKey<E>,
    pub sk: SecretKey<E>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ciphertext<E> {
    pub c: Vec<E>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PkeCiphertext<E> {
    pub c: Vec<E>,
    pub mask: Vec<u8>,
}

/// What an encapsulation knows: the ciphertext, the error pair and E.
#[derive(Clone, Debug)]
pub struct EncapTranscript<E> {
    pub ct: Ciphertext<E>,
    pub e1: Vec<E>,
    pub e2: Vec<E>,
    pub support: Subspace<E>,
    pub key: SharedKey,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u8)]
pub enum FileKind {
    PublicKey = 1,
    SecretKey = 2,
    KemCiphertext = 3,
    PkeCiphertext = 4,
}

impl FileKind {
    fn from_byte(b: u8) -> Result<Self> {
        Ok(match b {
            1 => Self::PublicKey,
            2 => Self::SecretKey,
            3 => Self::KemCiphertext,
            4 => Self::PkeCiphertext,
            _ => return Err(Error::Format(format!("unknown file kind {b}"))),
        })
    }
}

/// Header of a serialized object: kind and parameter-set id.
pub fn peek_header(bytes: &[u8]) -> Result<(FileKind, String)> {
    let mut r = Reader(bytes);
    let (kind, id, _) = read_header(&mut r)?;
    Ok((kind, id))
}

/// The scheme instantiated for one parameter set over a fixed 𝔽_{q^m}.
#[derive(Clone, Debug)]
pub struct LrpcScheme<F: ExtField> {
    field: F,
    params: ParamSet,
    modulus: IdealModulus,
}

impl<F: ExtField> LrpcScheme<F> {
    pub fn new(field: F, params: ParamSet) -> Result<Self> {
        if field.q() != params.q || field.m() != params.m {
            return domain(format!(
                "field is F_{}^{} but the set needs F_{}^{}",
                field.q(),
                field.m(),
                params.q,
                params.m
            ));
        }
        if params.d == 0 || params.r == 0 || params.d > params.m || params.r > params.m {
            return domain("need 1 ≤ d, r ≤ m");
        }
        let modulus = params.ideal_modulus()?;
        if !modulus.is_irreducible() {
            return domain("the ideal modulus must be irreducible");
        }
        Ok(Self { field, params, modulus })
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn params(&self) -> &ParamSet {
        &self.params
    }

    pub fn modulus(&self) -> &IdealModulus {
        &self.modulus
    }

    pub fn keygen<R: Rng + ?Sized>(&self, rng: &mut R) -> KeyPair<F::Elem> {
        let (f, n) = (&self.field, self.params.n);
        loop {
            let (support, _) = Subspace::random(f, self.params.d, rng).expect("d ≤ m");
            let x = sample_full_support(f, &support, n, rng).expect("d ≤ n");
            let Ok(x_inv) = ring_inv(f, &x, &self.modulus) else {
                continue;
            };
            let y = sample_full_support(f, &support, n, rng).expect("d ≤ n");
            let h = ring_mul(f, &x_inv, &y, &self.modulus).expect("lengths match");
            let f_basis = support.basis().to_vec();
            return KeyPair { pk: PublicKey { h }, sk: SecretKey { x, y, f_basis } };
        }
    }

    fn check_ring(&self, v: &[F::Elem], what: &str) -> Result<()> {
        if v.len() != self.params.n {
            return Err(Error::Format(format!("{what} has {} coefficients, expected {}", v.len(), self.params.n)));
        }
        Ok(())
    }

    pub fn encap_transcript<R: Rng + ?Sized>(
        &self,
        pk: &PublicKey<F::Elem>,
        rng: &mut R,
    ) -> Result<EncapTranscript<F::Elem>> {
        self.check_ring(&pk.h, "public key")?;
        let f = &self.field;
        let (support, _) = Subspace::random(f, self.params.r, rng)?;
        let (e1, e2) = sample_support_pair(f, &support, self.params.n, rng)?;
        let c = ring_add(f, &e1, &ring_mul(f, &e2, &pk.h, &self.modulus)?);
        let key = canonical_support_hash(f, &support);
        Ok(EncapTranscript { ct: Ciphertext { c }, e1, e2, support, key })
    }

    pub fn encap<R: Rng + ?Sized>(
        &self,
        pk: &PublicKey<F::Elem>,
        rng: &mut R,
    ) -> Result<(Ciphertext<F::Elem>, SharedKey)> {
        let t = self.encap_transcript(pk, rng)?;
        Ok((t.ct, t.key))
    }

    /// Syndrome x·c mod P.
    pub fn decap_syndrome(&self, sk: &SecretKey<F::Elem>, c: &[F::Elem]) -> Result<Vec<F::Elem>> {
        self.check_ring(c, "ciphertext")?;
        ring_mul(&self.field, &sk.x, c, &self.modulus)
    }

    /// Support recovered from c, or `None` (⊥).
    pub fn recover_support(&self, sk: &SecretKey<F::Elem>, c: &[F::Elem]) -> Result<Option<Subspace<F::Elem>>> {
        let s = self.decap_syndrome(sk, c)?;
        Ok(rsr(&self.field, &sk.f_basis, &s, self.params.r)?.support)
    }

    pub fn decap(&self, sk: &SecretKey<F::Elem>, ct: &Ciphertext<F::Elem>) -> Result<Option<SharedKey>> {
        Ok(self.recover_support(sk, &ct.c)?.map(|e| canonical_support_hash(&self.field, &e)))
    }

    pub fn encrypt<R: Rng + ?Sized>(
        &self,
        pk: &PublicKey<F::Elem>,
        message: &[u8],
        rng: &mut R,
    ) -> Result<PkeCiphertext<F::Elem>> {
        if message.is_empty() {
            return domain("empty message");
        }
        let t = self.encap_transcript(pk, rng)?;
        let stream = support_keystream(&self.field, &t.support, message.len());
        let mask = message.iter().zip(stream).map(|(a, b)| a ^ b).collect();
        Ok(PkeCiphertext { c: t.ct.c, mask })
    }

    pub fn decrypt(&self, sk: &SecretKey<F::Elem>, ct: &PkeCiphertext<F::Elem>) -> Result<Option<Vec<u8>>> {
        let Some(e) = self.recover_support(sk, &ct.c)? else {
            return Ok(None);
        };
        let stream = support_keystream(&self.field, &e, ct.mask.len());
        Ok(Some(ct.mask.iter().zip(stream).map(|(a, b)| a ^ b).collect()))
    }

    // Serialization: "LRPC", version, kind, id length, id, number of modulus
    // terms, exponents (u16 LE, highest first), then the payload. Ring
    // elements are bit-packed, so one takes exactly ⌈n·m·⌈log₂ q⌉/8⌉ bytes.

    fn header(&self, kind: FileKind) -> Vec<u8> {
        let mut out = MAGIC.to_vec();
        out.push(FORMAT_VERSION);
        out.push(kind as u8);
        out.push(self.params.id.len() as u8);
        out.extend_from_slice(self.params.id.as_bytes());
        let exps = self.modulus.exponents();
        out.push(exps.len() as u8);
        for e in exps {
            out.extend_from_slice(&(e as u16).to_le_bytes());
        }
        out
    }

    fn write_ring(&self, v: &[F::Elem], out: &mut Vec<u8>) {
        out.extend_from_slice(&pack_vector(&self.field, v));
    }

    fn open<'b>(&self, bytes: &'b [u8], want: FileKind) -> Result<Reader<'b>> {
        let mut r = Reader(bytes);
        let (kind, id, exps) = read_header(&mut r)?;
        if kind != want {
            return Err(Error::Format(format!("expected {want:?}, found {kind:?}")));
        }
        if id != self.params.id {
            return Err(Error::Format(format!("parameter set {id:?}, expected {:?}", self.params.id)));
        }
        if exps != self.modulus.exponents() {
            return Err(Error::Format("ideal modulus does not match the parameter set".into()));
        }
        Ok(r)
    }

    fn read_ring(&self, r: &mut Reader<'_>) -> Result<Vec<F::Elem>> {
        let n = self.params.n;
        unpack_vector(&self.field, r.take(packed_len(&self.field, n))?, n)
    }

    pub fn encode_public_key(&self, pk: &PublicKey<F::Elem>) -> Vec<u8> {
        let mut out = self.header(FileKind::PublicKey);
        self.write_ring(&pk.h, &mut out);
        out
    }

    pub fn decode_public_key(&self, bytes: &[u8]) -> Result<PublicKey<F::Elem>> {
        let mut r = self.open(bytes, FileKind::PublicKey)?;
        let h = self.read_ring(&mut r)?;
        r.finish()?;
        Ok(PublicKey { h })
    }

    pub fn encode_secret_key(&self, sk: &SecretKey<F::Elem>) -> Vec<u8> {
        let mut out = self.header(FileKind::SecretKey);
        self.write_ring(&sk.x, &mut out);
        self.write_ring(&sk.y, &mut out);
        out
    }

    /// Rebuilds F from x and checks Supp(y) = F, dim F = d and that x is
    /// invertible.
    pub fn decode_secret_key(&self, bytes: &[u8]) -> Result<SecretKey<F::Elem>> {
        let mut r = self.open(bytes, FileKind::SecretKey)?;
        let x = self.read_ring(&mut r)?;
        let y = self.read_ring(&mut r)?;
        r.finish()?;
        let f = &self.field;
        let support = Subspace::span(f, &x);
        if support.dim() != self.params.d || Subspace::span(f, &y) != support {
            return Err(Error::Format("secret key supports are inconsistent".into()));
        }
        if ring_inv(f, &x, &self.modulus).is_err() {
            return Err(Error::Format("secret key x is not invertible".into()));
        }
        Ok(SecretKey { x, y, f_basis: support.basis().to_vec() })
    }

    pub fn encode_ciphertext(&self, ct: &Ciphertext<F::Elem>) -> Vec<u8> {
        let mut out = self.header(FileKind::KemCiphertext);
        self.write_ring(&ct.c, &mut out);
        out
    }

    pub fn decode_ciphertext(&self, bytes: &[u8]) -> Result<Ciphertext<F::Elem>> {
        let mut r = self.open(bytes, FileKind::KemCiphertext)?;
        let c = self.read_ring(&mut r)?;
        r.finish()?;
        Ok(Ciphertext { c })
    }

    pub fn encode_pke_ciphertext(&self, ct: &PkeCiphertext<F::Elem>) -> Vec<u8> {
        let mut out = self.header(FileKind::PkeCiphertext);
        self.write_ring(&ct.c, &mut out);
        out.extend_from_slice(&(ct.mask.len() as u32).to_le_bytes());
        out.extend_from_slice(&ct.mask);
        out
    }

    pub fn decode_pke_ciphertext(&self, bytes: &[u8]) -> Result<PkeCiphertext<F::Elem>> {
        let mut r = self.open(bytes, FileKind::PkeCiphertext)?;
        let c = self.read_ring(&mut r)?;
        let len = u32::from_le_bytes(r.take(4)?.try_into().expect("4 bytes")) as usize;
        let mask = r.take(len)?.to_vec();
        r.finish()?;
        if mask.is_empty() {
            return Err(Error::Format("empty message".into()));
        }
        Ok(PkeCiphertext { c, mask })
    }
}

struct Reader<'a>(&'a [u8]);

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.0.len() < n {
            return Err(Error::Format("truncated input".into()));
        }
        let (head, tail) = self.0.split_at(n);
        self.0 = tail;
        Ok(head)
    }

    fn byte(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn finish(&self) -> Result<()> {
        if !self.0.is_empty() {
            return Err(Error::Format(format!("{} trailing bytes", self.0.len())));
        }
        Ok(())
    }
}

fn read_header(r: &mut Reader<'_>) -> Result<(FileKind, String, Vec<usize>)> {
    if r.take(4)? != MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let version = r.byte()?;
    if version != FORMAT_VERSION {
        return Err(Error::Format(format!("unsupported format version {version}")));
    }
    let kind = FileKind::from_byte(r.byte()?)?;
    let id_len = r.byte()? as usize;
    let id = std::str::from_utf8(r.take(id_len)?)
        .map_err(|_| Error::Format("parameter id is not UTF-8".into()))?
        .to_string();
    let terms = r.byte()? as usize;
    let exps = (0..terms)
        .map(|_| Ok(u16::from_le_bytes(r.take(2)?.try_into().expect("2 bytes")) as usize))
        .collect::<Result<_>>()?;
    Ok((kind, id, exps))
}
