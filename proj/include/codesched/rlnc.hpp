/*
 * Copyright 2026 The codesched Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "codesched/rng.hpp"

namespace codesched {

// A random-linear coded packet: the coefficient vector rides in the header,
// the payload is the GF(256)-linear combination of the bucket packets.
struct CodedPacket {
  std::vector<uint8_t> coefficients;  // length = bucket size
  std::vector<uint8_t> payload;       // length = symbols per packet
};

// Encodes one coded packet from a nonempty bucket. Coefficients are drawn
// uniformly from GF(256)^K. Throws std::invalid_argument on an empty bucket
// or ragged payload sizes.
CodedPacket encode(const std::vector<std::vector<uint8_t>>& bucket,
                   RngStream& rng);

// Incremental Gaussian elimination over GF(256). Rows are kept in reduced
// echelon form so decoding is a direct read-out once rank K is reached.
class GaussianDecoder {
 public:
  GaussianDecoder(int bucket_size, int symbols);

  // Returns true iff the packet increased the rank.
  bool absorb(const CodedPacket& packet);

  int rank() const { return rank_; }
  bool complete() const { return rank_ == bucket_size_; }
  int bucket_size() const { return bucket_size_; }

  // Requires complete(); returns the original bucket packets in order.
  std::vector<std::vector<uint8_t>> decode() const;

 private:
  int bucket_size_;
  int symbols_;
  int rank_ = 0;
  std::vector<std::vector<uint8_t>> rows_;  // coefficient part, per pivot col
  std::vector<std::vector<uint8_t>> row_payloads_;
  std::vector<int> pivot_row_;  // column -> row index, -1 when absent
};

// Batch decode: returns the K originals iff the coefficient matrix of the
// received packets has rank K.
std::optional<std::vector<std::vector<uint8_t>>> try_decode(
    const std::vector<CodedPacket>& received, int bucket_size);

}  // namespace codesched
