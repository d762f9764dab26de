#pragma once

#include <span>
#include <string_view>

// Fixed stopword and character-trigram profiles for the language scorer.
// Trigrams are taken over the lowercased sentence with non-letters collapsed
// to single spaces and a space pad on both ends; every entry is exactly
// three codepoints.

namespace biotok::corpus::profiles {

struct Profile {
  std::string_view label;
  std::span<const std::string_view> stopwords;
  std::span<const std::string_view> trigrams;
};

inline constexpr std::string_view kSpanishStopwords[] = {
    "de", "la", "que", "el", "en", "y", "a", "los", "del", "se", "las", "por",
    "un", "para", "con", "no", "una", "su", "al", "lo", "como", "más", "pero",
    "sus", "le", "ya", "o", "este", "sí", "porque", "esta", "entre", "cuando",
    "muy", "sin", "sobre", "también", "me", "hasta", "hay", "donde", "quien",
    "desde", "todo", "nos", "durante", "todos", "uno", "les", "ni", "contra",
    "fue", "es", "son", "está", "han", "ha"};

inline constexpr std::string_view kSpanishTrigrams[] = {
    // shared Iberian core, mirrored in the Portuguese profile
    " de", "de ", "ent", "nte", "est", " es", "res", "par", " pa", "ado",
    "ada", "os ", "as ", "ia ", "ica", "ico", "ura", "men", "nto", "era",
    "ara", " se", "dad", "al ", "ina", "que", " qu", " co", "ora", "aci",
    // distinctive Spanish orthography and endings
    " la", "la ", " el", "el ", " en", "en ", " y ", "ión", "ón ", "ció",
    "cio", "ien", "con", "los", "las", "del", "cia", "nci", "enc", "mie",
    "ía ", "ías", "eña", "ño ", "año", "ími", "gía", "nes", "ron", "zó ",
    "có ", "tó ", "só ", "ró ", "izó", "ién", "es ", "ivo", "iva", "ual"};

inline constexpr std::string_view kEnglishStopwords[] = {
    "the", "of", "and", "to", "in", "is", "that", "it", "was", "for", "on",
    "are", "as", "with", "his", "they", "at", "be", "this", "have", "from",
    "or", "one", "had", "by", "but", "not", "what", "all", "were", "we",
    "when", "your", "can", "said", "there", "use", "an", "each", "which",
    "she", "do", "how", "their", "if", "will", "up", "other", "about", "out",
    "then", "them", "these", "so", "some", "her", "would", "him", "has"};

inline constexpr std::string_view kEnglishTrigrams[] = {
    "the", " th", "he ", "ing", "ng ", " of", "of ", " an", "and", "nd ",
    " to", "to ", "ed ", " in", "tio", "ati", "for", " wi", "wit", "th ",
    "ere", " he", " be", "ion", "on ", "ent", "nt ", " re", "ver", "ter",
    "est", "ers", " co", "al ", " pa", "pat", "ly ", " wa", "was", "ith",
    "hat", " ha", "ale", " fe", "eve", "ts ", "nts", "ry "};

inline constexpr std::string_view kPortugueseStopwords[] = {
    "de", "a", "o", "que", "e", "do", "da", "em", "um", "para", "é", "com",
    "não", "uma", "os", "no", "se", "na", "por", "mais", "as", "dos", "como",
    "mas", "foi", "ao", "ele", "das", "tem", "à", "seu", "sua", "ou", "ser",
    "quando", "muito", "há", "nos", "já", "está", "eu", "também", "só",
    "pelo", "pela", "até", "isso", "ela", "entre", "era", "depois", "sem", "nas",
    "mesmo", "aos", "ter", "seus", "quem", "são", "foram", "durante"};

inline constexpr std::string_view kPortugueseTrigrams[] = {
    // shared Iberian core, mirrored in the Spanish profile
    " de", "de ", "ent", "nte", "est", " es", "res", "par", " pa", "ado",
    "ada", "os ", "as ", "ia ", "ica", "ico", "ura", "men", "nto", "era",
    "ara", " se", "dad", "al ", "ina", "que", " qu", " co", "ora", "aci",
    // distinctive Portuguese orthography and endings
    "ão ", "ção", "açã", "ões", "çõe", "õe ", " do", "do ", " da", "da ",
    "em ", " em", "não", "uma", " um", "com", "ça ", "ço ", "ços", "enç",
    "ssã", "são", "nha", "nho", "inh", "lho", "ilh", "alh", "ês ", "êm ",
    "am ", "ram", "oss", "ess", "eir", "ir ", "ais", "eis", "ou ", "iu ",
    "eu ", "áve", "íve", "ânc", "ênc", "rão"};

inline constexpr Profile kProfiles[] = {
    {"en", kEnglishStopwords, kEnglishTrigrams},
    {"es", kSpanishStopwords, kSpanishTrigrams},
    {"pt", kPortugueseStopwords, kPortugueseTrigrams},
};

}  // namespace biotok::corpus::profiles
