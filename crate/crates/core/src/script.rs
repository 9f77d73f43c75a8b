//! Devanagari character taxonomy and text sanitization.
//!
//! The classifier pipeline only ever sees characters from four retained
//! classes (independent vowels, consonants, dependent vowel signs, and
//! combining signs) plus the single space. Everything else (Latin text,
//! digits in either script, danda punctuation, stray symbols) is removed
//! before tokenization so that features describe the language, not the
//! typography of a particular source file.

/// Classification of a single scalar value for sanitization purposes.
///
/// The taxonomy follows fixed code-point ranges inside the main Devanagari
/// block (U+0900..U+097F). Characters outside those ranges fall through to
/// [`CharClass::Other`]; notably that includes U+0950 (ॐ) and the whole
/// Devanagari Extended block, which are stripped like any other symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CharClass {
    /// Stand-alone vowel letters such as अ, इ, ऊ.
    IndependentVowel,
    /// Consonant letters such as क, ख, plus the nukta forms क़..य़.
    Consonant,
    /// Dependent vowel signs (matras) such as ा, ि, ी.
    Matra,
    /// Combining and spacing signs: candrabindu, anusvara, visarga, nukta,
    /// avagraha, virama, stress/tone marks, and the abbreviation signs.
    Sign,
    /// Devanagari digits ०..९.
    DevanagariDigit,
    /// Danda and double danda.
    DevanagariPunct,
    /// Any Unicode whitespace.
    Whitespace,
    /// Everything else, including characters from other scripts.
    Other,
}

/// Classify one character.
pub fn classify_char(c: char) -> CharClass {
    match c as u32 {
        0x0900..=0x0903 => CharClass::Sign,
        0x0904..=0x0914 => CharClass::IndependentVowel,
        0x0915..=0x0939 => CharClass::Consonant,
        0x093A..=0x093B => CharClass::Matra,
        0x093C..=0x093D => CharClass::Sign,
        0x093E..=0x094C => CharClass::Matra,
        0x094D => CharClass::Sign,
        0x094E..=0x094F => CharClass::Matra,
        0x0951..=0x0954 => CharClass::Sign,
        0x0955..=0x0957 => CharClass::Matra,
        0x0958..=0x095F => CharClass::Consonant,
        0x0960..=0x0961 => CharClass::IndependentVowel,
        0x0962..=0x0963 => CharClass::Matra,
        0x0964..=0x0965 => CharClass::DevanagariPunct,
        0x0966..=0x096F => CharClass::DevanagariDigit,
        0x0970..=0x0971 => CharClass::Sign,
        0x0972..=0x0977 => CharClass::IndependentVowel,
        0x0978..=0x097F => CharClass::Consonant,
        _ if c.is_whitespace() => CharClass::Whitespace,
        _ => CharClass::Other,
    }
}

/// True for the four classes that survive sanitization.
pub fn is_retained(c: char) -> bool {
    matches!(
        classify_char(c),
        CharClass::IndependentVowel | CharClass::Consonant | CharClass::Matra | CharClass::Sign
    )
}

/// Remove everything but retained Devanagari characters and word breaks.
///
/// Non-retained, non-whitespace characters are deleted in place without
/// introducing a word break ("क12ख" becomes "कख"). Whitespace runs collapse
/// to a single ASCII space, and the result carries no leading or trailing
/// space. Sanitizing twice is a no-op.
pub fn sanitize(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut pending_space = false;
    for c in text.chars() {
        match classify_char(c) {
            CharClass::Whitespace => {
                if !out.is_empty() {
                    pending_space = true;
                }
            }
            CharClass::IndependentVowel | CharClass::Consonant | CharClass::Matra | CharClass::Sign => {
                if pending_space {
                    out.push(' ');
                    pending_space = false;
                }
                out.push(c);
            }
            CharClass::DevanagariDigit | CharClass::DevanagariPunct | CharClass::Other => {}
        }
    }
    out
}

/// The fixed phoneme inventory: every retained character, grouped by class
/// and sorted by code point within each group.
#[derive(Debug, Clone)]
pub struct PhonemeInventory {
    pub independent_vowels: Vec<char>,
    pub consonants: Vec<char>,
    pub matras: Vec<char>,
    pub signs: Vec<char>,
}

/// Enumerate the inventory by scanning the Devanagari block once.
pub fn phoneme_inventory() -> PhonemeInventory {
    let mut inv = PhonemeInventory {
        independent_vowels: Vec::new(),
        consonants: Vec::new(),
        matras: Vec::new(),
        signs: Vec::new(),
    };
    for cp in 0x0900u32..=0x097F {
        let c = char::from_u32(cp).expect("Devanagari block contains no surrogates");
        match classify_char(c) {
            CharClass::IndependentVowel => inv.independent_vowels.push(c),
            CharClass::Consonant => inv.consonants.push(c),
            CharClass::Matra => inv.matras.push(c),
            CharClass::Sign => inv.signs.push(c),
            _ => {}
        }
    }
    inv
}
