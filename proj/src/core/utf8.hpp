#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace forest::utf8 {

class DecodeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Decodes UTF-8 into Unicode scalar values. Throws DecodeError on malformed
// sequences, overlong forms and surrogates.
std::u32string decode(std::string_view text);

std::string encode(std::u32string_view text);
std::string encode(char32_t cp);

bool is_valid(std::string_view text);

}  // namespace forest::utf8
