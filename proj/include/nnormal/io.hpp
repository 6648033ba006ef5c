#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "nnormal/matrix.hpp"
#include "nnormal/model.hpp"

namespace nnormal {

/// Reads a model document. `source` prefixes error messages, which carry
/// the line and the JSON pointer of the offending value.
AnyModel parse_model(std::string_view text, const std::string& source = "<input>");
AnyModel load_model(const std::filesystem::path& path);

std::string serialize(const OperatorModel& a);
std::string serialize(const MultiplicityInput& a);
std::string serialize(const AnyModel& a);

/// 16 hex digits of FNV-1a 64 over serialize(a).
std::string model_hash(const OperatorModel& a);

/// Per-cell matrices of one commutant element, tagged with the owner hash.
std::vector<Matrix> parse_element(std::string_view text, const OperatorModel& owner,
                                  const std::string& source = "<input>");
std::vector<Matrix> load_element(const std::filesystem::path& path, const OperatorModel& owner);
std::string serialize_element(const OperatorModel& owner, const std::vector<Matrix>& fibers);

std::vector<std::vector<Matrix>> parse_family(std::string_view text, const OperatorModel& owner,
                                              const std::string& source = "<input>");
std::vector<std::vector<Matrix>> load_family(const std::filesystem::path& path, const OperatorModel& owner);
std::string serialize_family(const OperatorModel& owner, const std::vector<std::vector<Matrix>>& members);

}  // namespace nnormal
