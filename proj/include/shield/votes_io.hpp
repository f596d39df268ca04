// Copyright (c) 2026 The shield Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "shield/types.hpp"

namespace shield::io {

/// Vote CSV: header `sample_id,teacher_id,class`, one row per vote.
/// sample_id / teacher_id are nonnegative integers, class is 1-based.
/// Samples are ordered by ascending sample_id, teachers by ascending
/// teacher_id; every sample must carry exactly the same teacher set, one
/// vote each. num_classes, when given, widens the class range beyond the
/// maximum observed; a class above it is a validation error.
core::VoteMatrix read_votes_csv(std::istream& in,
                                std::optional<int> num_classes = {});
core::VoteMatrix read_votes_csv_file(const std::string& path,
                                     std::optional<int> num_classes = {});

/// Histogram JSON: {"K": int, "counts": [K nonnegative ints],
/// "offset": int >= 0}; "offset" is optional and defaults to 0.
core::VoteHistogram read_histogram_json(std::istream& in);
core::VoteHistogram read_histogram_json_file(const std::string& path);

/// True when the file parses as a histogram JSON object (used to route
/// inputs that may be either format).
bool looks_like_histogram_json(const std::string& path);

}  // namespace shield::io
