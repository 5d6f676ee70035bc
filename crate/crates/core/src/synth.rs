//! Seeded synthetic corpora, so tests, benchmarks and the bundled sample
//! corpus all run offline and reproduce bit-for-bit.
//!
//! Two flavors:
//!
//! - the default corpus draws titles from curated Portuguese word pools with
//!   controlled overlap between research areas;
//! - `disjoint` mode gives every specialist a private coded vocabulary whose
//!   radicals never collide across specialists, which pins down retrieval
//!   tests that need unique profiles.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{CurriculumRecord, Work, WorkKind};

pub const AREA_LABELS: [&str; 4] = ["exatas", "humanas", "biologicas", "engenharias"];

const FIRST_NAMES: [&str; 12] = [
    "Ana", "Bruno", "Carla", "Daniel", "Elisa", "Fabio", "Gabriela", "Hugo", "Iara", "Joao",
    "Karina", "Lucas",
];

const LAST_NAMES: [&str; 12] = [
    "Silva", "Santos", "Oliveira", "Souza", "Costa", "Pereira", "Almeida", "Ferreira", "Gomes",
    "Martins", "Rocha", "Lima",
];

const EXATAS: [&str; 24] = [
    "algoritmos", "matemática", "estatística", "probabilidade", "otimização", "grafos",
    "computação", "inteligência", "artificial", "aprendizado", "máquina", "mineração",
    "software", "sistemas", "distribuídos", "paralelismo", "simulação", "numérica",
    "modelagem", "computacional", "criptografia", "segurança", "informação", "álgebra",
];

const HUMANAS: [&str; 24] = [
    "educação", "sociologia", "filosofia", "história", "cultura", "sociedade", "política",
    "pública", "linguagem", "literatura", "ensino", "aprendizagem", "pedagogia", "psicologia",
    "comportamento", "ética", "direito", "economia", "trabalho", "memória", "identidade",
    "discurso", "narrativa", "comunicação",
];

const BIOLOGICAS: [&str; 24] = [
    "biologia", "genética", "molecular", "célula", "proteína", "enzima", "ecologia",
    "biodiversidade", "espécies", "evolução", "microbiologia", "bactéria", "vírus",
    "imunologia", "vacina", "saúde", "epidemiologia", "doença", "clínica", "farmacologia",
    "nutrição", "fisiologia", "neurociência", "botânica",
];

const ENGENHARIAS: [&str; 24] = [
    "engenharia", "estruturas", "materiais", "concreto", "mecânica", "termodinâmica",
    "energia", "elétrica", "eletrônica", "circuitos", "automação", "robótica", "controle",
    "sensores", "telecomunicações", "sinais", "processamento", "manufatura", "produção",
    "qualidade", "logística", "transporte", "hidráulica", "ambiental",
];

const SHARED: [&str; 16] = [
    "análise", "estudo", "avaliação", "desenvolvimento", "aplicação", "metodologia",
    "proposta", "abordagem", "revisão", "brasil", "impacto", "gestão", "modelo", "técnica",
    "ferramenta", "experimento",
];

fn curated_pool(area: usize) -> &'static [&'static str] {
    match area % 4 {
        0 => &EXATAS,
        1 => &HUMANAS,
        2 => &BIOLOGICAS,
        _ => &ENGENHARIAS,
    }
}

#[derive(Debug, Clone)]
pub struct SynthConfig {
    pub specialists: usize,
    pub areas: usize,
    pub seed: u64,
    pub min_works: usize,
    pub max_works: usize,
    /// Coded words added to each area pool on top of the curated ones;
    /// raises the distinct-radical count without new word lists.
    pub coded_words_per_area: usize,
    /// When set, every specialist draws from a private coded pool and the
    /// curated/shared pools are not used at all.
    pub disjoint: bool,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            specialists: 100,
            areas: 4,
            seed: 42,
            min_works: 2,
            max_works: 6,
            coded_words_per_area: 0,
            disjoint: false,
        }
    }
}

const CONSONANTS: [char; 12] = ['b', 'd', 'f', 'g', 'k', 'l', 'm', 'n', 'p', 'r', 't', 'z'];
const VOWELS: [char; 4] = ['a', 'e', 'i', 'u'];

/// Letters-only word from a number, as consonant-vowel syllables with the
/// given prefix. Distinct numbers give distinct words, and the stemmer can
/// only touch the trailing syllables, so distinct prefixes survive into the
/// radicals.
fn coded_word(prefix: &str, mut n: usize, syllables: usize) -> String {
    let base = CONSONANTS.len() * VOWELS.len();
    let mut word = String::from(prefix);
    for _ in 0..syllables {
        let digit = n % base;
        n /= base;
        word.push(CONSONANTS[digit % CONSONANTS.len()]);
        word.push(VOWELS[digit / CONSONANTS.len()]);
    }
    word
}

fn title_from_pool(pool: &[String], rng: &mut ChaCha8Rng) -> String {
    let pick = |rng: &mut ChaCha8Rng| pool[rng.gen_range(0..pool.len())].clone();
    match rng.gen_range(0..5) {
        0 => format!("Análise de {} em {}", pick(rng), pick(rng)),
        1 => format!("Estudo de {} e {} no brasil", pick(rng), pick(rng)),
        2 => format!("{} para {} em {}", pick(rng), pick(rng), pick(rng)),
        3 => format!("Avaliação de {} com {}", pick(rng), pick(rng)),
        _ => format!("Um modelo de {} para {}", pick(rng), pick(rng)),
    }
}

/// Deterministically generates a corpus for the given configuration.
pub fn generate(config: &SynthConfig) -> Vec<CurriculumRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let areas = config.areas.max(1);

    // per-area word pools
    let pools: Vec<Vec<String>> = (0..areas)
        .map(|a| {
            let mut pool: Vec<String> =
                curated_pool(a).iter().map(|w| w.to_string()).collect();
            pool.extend(SHARED.iter().map(|w| w.to_string()));
            let prefix: String = coded_word("", a + 1, 1);
            for n in 0..config.coded_words_per_area {
                pool.push(coded_word(&prefix, n, 3));
            }
            pool
        })
        .collect();

    let mut records = Vec::with_capacity(config.specialists);
    for i in 0..config.specialists {
        let area = i % areas;
        let area_label = AREA_LABELS[area % AREA_LABELS.len()];
        let private_pool: Vec<String>;
        let pool: &[String] = if config.disjoint {
            // syllable space per specialist is disjoint by construction
            private_pool = (0..6).map(|w| coded_word("", i * 8 + w + 1, 4)).collect();
            &private_pool
        } else {
            &pools[area]
        };

        let works_count = rng.gen_range(config.min_works..=config.max_works);
        let works: Vec<Work> = (0..works_count)
            .map(|w| {
                let kind = WorkKind::ALL[(i + w) % WorkKind::ALL.len()];
                let title = if config.disjoint {
                    let a = pool[rng.gen_range(0..pool.len())].clone();
                    let b = pool[rng.gen_range(0..pool.len())].clone();
                    format!("{a} {b}")
                } else {
                    title_from_pool(pool, &mut rng)
                };
                let keywords = (0..rng.gen_range(0..3))
                    .map(|_| pool[rng.gen_range(0..pool.len())].clone())
                    .collect();
                Work {
                    kind,
                    title,
                    keywords,
                    year: Some(1995 + (rng.gen_range(0..28) as i32)),
                }
            })
            .collect();

        records.push(CurriculumRecord {
            specialist_id: format!("S{i:04}"),
            name: format!(
                "{} {}",
                FIRST_NAMES[rng.gen_range(0..FIRST_NAMES.len())],
                LAST_NAMES[rng.gen_range(0..LAST_NAMES.len())]
            ),
            major_area: area_label.to_string(),
            works,
        });
    }
    records
}

/// The bundled sample corpus: 100 specialists across 4 areas, seed 42.
pub fn sample_corpus() -> Vec<CurriculumRecord> {
    generate(&SynthConfig::default())
}
