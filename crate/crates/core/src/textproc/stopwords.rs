//! Built-in stopword tables, pre-normalized (lowercase, diacritics folded).

pub(crate) const PT: &[&str] = &[
    "a", "agora", "ainda", "alem", "algum", "alguma", "algumas", "alguns", "ali", "ao", "aos",
    "apenas", "apos", "aquela", "aquelas", "aquele", "aqueles", "aqui", "aquilo", "as", "assim",
    "ate", "atraves", "cada", "com", "como", "contra", "contudo", "cuja", "cujas", "cujo",
    "cujos", "da", "daquele", "das", "de", "dela", "delas", "dele", "deles", "demais", "depois",
    "desde", "dessa", "dessas", "desse", "desses", "desta", "destas", "deste", "destes", "deve",
    "devem", "do", "dos", "dum", "duma", "durante", "e", "ela", "elas", "ele", "eles", "em",
    "embora", "enquanto", "entao", "entre", "era", "eram", "essa", "essas", "esse", "esses",
    "esta", "estamos", "estao", "estas", "estava", "estavam", "este", "estes", "esteve", "estou",
    "eu", "foi", "fomos", "for", "foram", "fosse", "grande", "ha", "houve", "isso", "isto", "ja",
    "la", "lhe", "lhes", "lo", "mais", "mas", "me", "mesma", "mesmas", "mesmo", "mesmos", "meu",
    "meus", "minha", "minhas", "muita", "muitas", "muito", "muitos", "na", "nada", "nao", "nas",
    "nem", "nenhum", "nenhuma", "nessa", "nesse", "nesta", "neste", "no", "nos", "nossa",
    "nossas", "nosso", "nossos", "num", "numa", "nunca", "o", "onde", "os", "ou", "outra",
    "outras", "outro", "outros", "para", "pela", "pelas", "pelo", "pelos", "per", "perante",
    "pode", "podem", "pois", "por", "porque", "portanto", "pouca", "poucas", "pouco", "poucos",
    "qual", "quais", "qualquer", "quando", "quanto", "que", "quem", "se", "seja", "sem", "sendo",
    "ser", "sera", "serao", "seria", "seu", "seus", "so", "sob", "sobre", "somente", "sua",
    "suas", "tal", "tais", "tambem", "tanto", "te", "tem", "temos", "tenha", "ter", "teu", "teve",
    "tinha", "toda", "todas", "todo", "todos", "tu", "tua", "tuas", "tudo", "um", "uma", "umas",
    "uns", "vos", "voce", "voces",
];

pub(crate) const EN: &[&str] = &[
    "a", "about", "above", "after", "again", "against", "all", "also", "although", "am", "among",
    "an", "and", "any", "are", "as", "at", "based", "be", "because", "been", "before", "being",
    "below", "between", "both", "but", "by", "can", "could", "did", "do", "does", "doing",
    "down", "during", "each", "either", "else", "few", "for", "from", "further", "had", "has",
    "have", "having", "he", "her", "here", "hers", "him", "his", "how", "i", "if", "in", "into",
    "is", "it", "its", "just", "may", "might", "more", "most", "must", "neither", "no", "nor",
    "not", "now", "of", "off", "on", "once", "only", "or", "other", "our", "ours", "out", "over",
    "own", "per", "same", "shall", "she", "should", "since", "so", "some", "such", "than",
    "that", "the", "their", "theirs", "them", "then", "there", "these", "they", "this", "those",
    "through", "to", "too", "toward", "towards", "under", "unless", "until", "up", "upon",
    "using", "very", "via", "was", "we", "were", "what", "when", "where", "whether", "which",
    "while", "who", "whom", "whose", "why", "will", "with", "within", "without", "would", "you",
    "your", "yours",
];

pub(crate) const ES: &[&str] = &[
    "a", "al", "algo", "alguna", "algunas", "alguno", "algunos", "ante", "antes", "aqui", "bajo",
    "cada", "como", "con", "contra", "cual", "cuales", "cuando", "cuya", "cuyo", "de", "del",
    "desde", "donde", "durante", "e", "el", "ella", "ellas", "ellos", "en", "entre", "era",
    "eran", "es", "esa", "esas", "ese", "eso", "esos", "esta", "estas", "este", "esto", "estos",
    "fue", "fueron", "ha", "han", "hasta", "hay", "la", "las", "le", "les", "lo", "los", "mas",
    "me", "mi", "mis", "mucha", "muchas", "mucho", "muchos", "muy", "nada", "ni", "no", "nos",
    "nosotros", "nuestra", "nuestras", "nuestro", "nuestros", "o", "os", "otra", "otras", "otro",
    "otros", "para", "pero", "poco", "pocos", "por", "porque", "que", "quien", "quienes", "se",
    "segun", "ser", "si", "sin", "sobre", "son", "su", "sus", "tal", "tambien", "tanto", "te",
    "tiene", "tienen", "toda", "todas", "todo", "todos", "tras", "tu", "tus", "un", "una",
    "unas", "uno", "unos", "usted", "ustedes", "vosotros", "y", "ya", "yo",
];
