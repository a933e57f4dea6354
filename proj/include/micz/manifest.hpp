#pragma once

#include <string>
#include <string_view>

namespace micz {

/// Hex SHA-1 of the git blob encoding of `content` ("blob <len>\0<content>").
std::string git_blob_sha1(std::string_view content);

}  // namespace micz
