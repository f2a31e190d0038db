#pragma once

#include <stdexcept>
#include <string>

namespace wikicast {

/// Bad or missing user-supplied input (files, config, CLI values).
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A model that cannot be evaluated: constant targets, no usable articles.
class DegenerateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace wikicast
