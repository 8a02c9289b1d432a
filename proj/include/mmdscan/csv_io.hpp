#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>

#include "mmdscan/dataset.hpp"

namespace mmdscan {

/// Dataset CSV format
///
///   - one sequence per row, comma-separated reals ('.' decimal point,
///     parsed independently of the C locale);
///   - consecutive groups of `dim` values form one sample;
///   - an optional leading field `id:<label>` names the row;
///   - blank lines and lines starting with '#' are ignored.
///
/// Every row must hold the same number of values. Ragged rows raise a
/// ParseError naming the 1-based line.
Dataset parse_dataset(std::istream& sequences, std::size_t dim,
                      std::istream* reference = nullptr);

/// Reads `path` (and `reference_path`, which must hold exactly one row).
/// Missing files raise InvalidInput.
Dataset load_dataset(const std::filesystem::path& path, std::size_t dim,
                     const std::optional<std::filesystem::path>& reference_path = std::nullopt);

/// Writes the sequences (not the reference) in the format above with
/// shortest round-trip formatting.
void write_dataset_csv(std::ostream& out, const Dataset& d);
void write_sequence_csv(std::ostream& out, const Sequence& s);

}  // namespace mmdscan
