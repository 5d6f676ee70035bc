//! Built-in suffix-stripping tables.
//!
//! Each entry is `(suffix, minimum stem length in chars, replacement)`.
//! Rules are applied in order as a cascade: whenever the current token ends
//! with `suffix` and the remaining stem is long enough, the suffix is
//! replaced and scanning continues with the rewritten token. Suffixes are
//! written post-folding, so they never contain diacritics.
//!
//! The Portuguese table follows the RSLP layout: plural, feminine, adverb,
//! augmentative/diminutive, noun suffix, verb suffix, final vowel.

pub(crate) const PT_RULES: &[(&str, usize, &str)] = &[
    // plural
    ("oes", 2, "ao"),
    ("aes", 2, "ao"),
    ("ais", 2, "al"),
    ("eis", 2, "el"),
    ("ois", 2, "ol"),
    ("is", 2, "il"),
    ("ns", 1, "m"),
    ("res", 3, "r"),
    ("s", 2, ""),
    // feminine -> masculine form
    ("ona", 3, "ao"),
    ("ora", 3, "or"),
    ("na", 4, "no"),
    ("esa", 3, "es"),
    ("osa", 3, "oso"),
    ("ica", 3, "ico"),
    ("ira", 3, "iro"),
    // adverb
    ("mente", 4, ""),
    // augmentative / diminutive
    ("issimo", 3, ""),
    ("issima", 3, ""),
    ("zinho", 2, ""),
    ("zinha", 2, ""),
    ("inho", 3, ""),
    ("inha", 3, ""),
    // noun suffixes
    ("izacao", 4, ""),
    ("encia", 3, ""),
    ("ancia", 3, ""),
    ("agem", 3, ""),
    ("amento", 3, ""),
    ("imento", 3, ""),
    ("idade", 3, ""),
    ("ismo", 3, ""),
    ("ista", 3, ""),
    ("istico", 3, ""),
    ("avel", 3, ""),
    ("ivel", 3, ""),
    ("ico", 4, ""),
    ("oso", 3, ""),
    ("eza", 3, ""),
    ("ez", 3, ""),
    ("acao", 3, ""),
    ("ia", 4, ""),
    ("or", 3, ""),
    // verb suffixes
    ("ando", 2, ""),
    ("endo", 2, ""),
    ("indo", 2, ""),
    ("ado", 2, ""),
    ("ada", 2, ""),
    ("ido", 2, ""),
    ("ida", 2, ""),
    ("ar", 2, ""),
    ("er", 2, ""),
    ("ir", 2, ""),
    ("ou", 2, ""),
    ("am", 3, ""),
    // final vowel
    ("a", 3, ""),
    ("e", 3, ""),
    ("o", 3, ""),
];

pub(crate) const EN_RULES: &[(&str, usize, &str)] = &[
    ("sses", 2, "ss"),
    ("ities", 3, ""),
    ("ies", 2, "i"),
    ("s", 3, ""),
    ("ization", 3, ""),
    ("ized", 3, ""),
    ("izing", 3, ""),
    ("ize", 3, ""),
    ("fulness", 3, ""),
    ("ousness", 3, ""),
    ("iveness", 3, ""),
    ("al", 4, ""),
    ("ation", 4, ""),
    ("ion", 4, ""),
    ("ence", 3, ""),
    ("ance", 3, ""),
    ("ness", 3, ""),
    ("ment", 3, ""),
    ("ity", 3, ""),
    ("ful", 3, ""),
    ("less", 3, ""),
    ("ly", 3, ""),
    ("er", 3, ""),
    ("ed", 3, ""),
    ("ing", 3, ""),
    ("y", 2, "i"),
    ("e", 3, ""),
];

pub(crate) const ES_RULES: &[(&str, usize, &str)] = &[
    ("ciones", 2, "cion"),
    ("iones", 2, "ion"),
    ("ces", 2, "z"),
    ("es", 3, ""),
    ("s", 2, ""),
    ("mente", 4, ""),
    ("isimo", 3, ""),
    ("isima", 3, ""),
    ("acion", 3, ""),
    ("icion", 3, ""),
    ("idad", 3, ""),
    ("ismo", 3, ""),
    ("ista", 3, ""),
    ("istico", 3, ""),
    ("istica", 3, ""),
    ("ico", 4, ""),
    ("ica", 4, ""),
    ("oso", 3, ""),
    ("osa", 3, ""),
    ("able", 3, ""),
    ("ible", 3, ""),
    ("ia", 4, ""),
    ("ando", 2, ""),
    ("iendo", 2, ""),
    ("ado", 2, ""),
    ("ada", 2, ""),
    ("ido", 2, ""),
    ("ida", 2, ""),
    ("ar", 2, ""),
    ("er", 2, ""),
    ("ir", 2, ""),
    ("a", 3, ""),
    ("e", 3, ""),
    ("o", 3, ""),
];
