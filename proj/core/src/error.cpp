#include "hmer/error.hpp"

namespace hmer {

ParseError::ParseError(const std::string& what, std::size_t position)
    : Error(what), position_(position) {}

}  // namespace hmer
