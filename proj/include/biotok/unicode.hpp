#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

// Minimal UTF-8 and byte-level helpers shared by the corpus and tokenizer
// code. Classification tables cover ASCII plus the Latin ranges that matter
// for Spanish text; they are fixed so results never depend on the locale.

namespace biotok::uni {

constexpr char32_t kInvalid = 0xFFFD;

struct Decoded {
  char32_t cp;
  int len;      // bytes consumed, always >= 1
  bool valid;
};

// Decodes the codepoint starting at text[i]. Malformed sequences consume a
// single byte and come back as invalid.
inline Decoded decode(std::string_view text, size_t i) {
  const auto b0 = static_cast<unsigned char>(text[i]);
  if (b0 < 0x80) return {b0, 1, true};

  auto cont = [&](size_t k) {
    return i + k < text.size() &&
           (static_cast<unsigned char>(text[i + k]) & 0xC0) == 0x80;
  };
  auto at = [&](size_t k) { return static_cast<unsigned char>(text[i + k]); };

  if ((b0 & 0xE0) == 0xC0 && cont(1)) {
    char32_t cp = ((b0 & 0x1Fu) << 6) | (at(1) & 0x3Fu);
    if (cp >= 0x80) return {cp, 2, true};
  } else if ((b0 & 0xF0) == 0xE0 && cont(1) && cont(2)) {
    char32_t cp = ((b0 & 0x0Fu) << 12) | ((at(1) & 0x3Fu) << 6) | (at(2) & 0x3Fu);
    if (cp >= 0x800 && (cp < 0xD800 || cp > 0xDFFF)) return {cp, 3, true};
  } else if ((b0 & 0xF8) == 0xF0 && cont(1) && cont(2) && cont(3)) {
    char32_t cp = ((b0 & 0x07u) << 18) | ((at(1) & 0x3Fu) << 12) |
                  ((at(2) & 0x3Fu) << 6) | (at(3) & 0x3Fu);
    if (cp >= 0x10000 && cp <= 0x10FFFF) return {cp, 4, true};
  }
  return {kInvalid, 1, false};
}

inline void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

inline std::string to_utf8(char32_t cp) {
  std::string s;
  append_utf8(s, cp);
  return s;
}

inline bool is_valid_utf8(std::string_view text) {
  for (size_t i = 0; i < text.size();) {
    Decoded d = decode(text, i);
    if (!d.valid) return false;
    i += static_cast<size_t>(d.len);
  }
  return true;
}

inline bool is_space(char32_t cp) {
  switch (cp) {
    case 0x09: case 0x0A: case 0x0B: case 0x0C: case 0x0D: case 0x20:
    case 0x85: case 0xA0: case 0x1680: case 0x2028: case 0x2029:
    case 0x202F: case 0x205F: case 0x3000:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200A;
  }
}

inline bool is_digit(char32_t cp) { return cp >= '0' && cp <= '9'; }

// Uppercase letters as sentence-start markers: ASCII plus Latin-1, which
// covers the accented capitals used in Spanish.
inline bool is_upper(char32_t cp) {
  return (cp >= 'A' && cp <= 'Z') || (cp >= 0xC0 && cp <= 0xD6) ||
         (cp >= 0xD8 && cp <= 0xDE);
}

inline bool is_letter(char32_t cp) {
  if ((cp >= 'A' && cp <= 'Z') || (cp >= 'a' && cp <= 'z')) return true;
  if (cp == 0xAA || cp == 0xB5 || cp == 0xBA) return true;
  if (cp >= 0xC0 && cp <= 0xFF) return cp != 0xD7 && cp != 0xF7;
  if (cp >= 0x100 && cp <= 0x24F) return true;   // Latin Extended-A/B
  if (cp >= 0x370 && cp <= 0x3FF) return cp != 0x374 && cp != 0x375 && cp != 0x37E;
  if (cp >= 0x400 && cp <= 0x4FF) return true;   // Cyrillic
  return false;
}

// ASCII + Latin-1 lowercase fold, enough for the language profiles.
inline char32_t to_lower(char32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 0x20;
  if ((cp >= 0xC0 && cp <= 0xD6) || (cp >= 0xD8 && cp <= 0xDE)) return cp + 0x20;
  return cp;
}

// Byte-level BPE renders every byte as a printable character so vocab and
// merge files stay readable. Printable Latin-1 bytes map to themselves, the
// rest are relocated to 0x100.. in increasing byte order (space becomes
// U+0120, newline U+010A, and so on).
struct ByteCharMap {
  std::array<char32_t, 256> byte_to_char{};
  // Sparse inverse; keyed on the codepoints used above (all < 0x180).
  std::array<int, 0x180> char_to_byte{};

  ByteCharMap() {
    char_to_byte.fill(-1);
    auto printable = [](int b) {
      return (b >= 0x21 && b <= 0x7E) || (b >= 0xA1 && b <= 0xAC) ||
             (b >= 0xAE && b <= 0xFF);
    };
    int next = 0;
    for (int b = 0; b < 256; ++b) {
      char32_t cp = printable(b) ? static_cast<char32_t>(b)
                                 : static_cast<char32_t>(256 + next++);
      byte_to_char[static_cast<size_t>(b)] = cp;
      char_to_byte[cp] = b;
    }
  }
};

inline const ByteCharMap& byte_char_map() {
  static const ByteCharMap map;
  return map;
}

// Renders raw bytes in the printable byte-level alphabet.
inline std::string render_bytes(std::string_view raw) {
  const auto& map = byte_char_map();
  std::string out;
  out.reserve(raw.size() * 2);
  for (unsigned char b : raw) append_utf8(out, map.byte_to_char[b]);
  return out;
}

// Inverse of render_bytes. Returns false if a codepoint is outside the
// byte-level alphabet.
inline bool unrender_bytes(std::string_view rendered, std::string& out) {
  const auto& map = byte_char_map();
  for (size_t i = 0; i < rendered.size();) {
    Decoded d = decode(rendered, i);
    if (!d.valid || d.cp >= 0x180 || map.char_to_byte[d.cp] < 0) return false;
    out.push_back(static_cast<char>(map.char_to_byte[d.cp]));
    i += static_cast<size_t>(d.len);
  }
  return true;
}

}  // namespace biotok::uni
