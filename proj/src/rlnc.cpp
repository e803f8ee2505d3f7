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

#include "codesched/rlnc.hpp"

#include <stdexcept>

#include "codesched/gf256.hpp"

namespace codesched {

CodedPacket encode(const std::vector<std::vector<uint8_t>>& bucket,
                   RngStream& rng) {
  if (bucket.empty()) {
    throw std::invalid_argument("encode: bucket is empty");
  }
  const size_t symbols = bucket.front().size();
  for (const auto& p : bucket) {
    if (p.size() != symbols) {
      throw std::invalid_argument("encode: packets differ in size");
    }
  }

  CodedPacket out;
  out.coefficients.resize(bucket.size());
  for (auto& c : out.coefficients) c = rng.byte();

  out.payload.assign(symbols, 0);
  for (size_t k = 0; k < bucket.size(); ++k) {
    const uint8_t c = out.coefficients[k];
    if (c == 0) continue;
    for (size_t s = 0; s < symbols; ++s) {
      out.payload[s] = gf256::add(out.payload[s], gf256::mul(c, bucket[k][s]));
    }
  }
  return out;
}

GaussianDecoder::GaussianDecoder(int bucket_size, int symbols)
    : bucket_size_(bucket_size),
      symbols_(symbols),
      pivot_row_(static_cast<size_t>(bucket_size), -1) {
  if (bucket_size < 1) {
    throw std::invalid_argument("GaussianDecoder: bucket size must be >= 1");
  }
}

bool GaussianDecoder::absorb(const CodedPacket& packet) {
  if (static_cast<int>(packet.coefficients.size()) != bucket_size_) {
    throw std::invalid_argument("absorb: coefficient length mismatch");
  }
  std::vector<uint8_t> coeff = packet.coefficients;
  std::vector<uint8_t> payload = packet.payload;
  payload.resize(static_cast<size_t>(symbols_), 0);

  for (int col = 0; col < bucket_size_; ++col) {
    const uint8_t lead = coeff[static_cast<size_t>(col)];
    if (lead == 0) continue;
    const int r = pivot_row_[static_cast<size_t>(col)];
    if (r >= 0) {
      // Cancel against the existing pivot row.
      const auto& prow = rows_[static_cast<size_t>(r)];
      const auto& ppay = row_payloads_[static_cast<size_t>(r)];
      for (int c = col; c < bucket_size_; ++c) {
        coeff[static_cast<size_t>(c)] = gf256::add(
            coeff[static_cast<size_t>(c)],
            gf256::mul(lead, prow[static_cast<size_t>(c)]));
      }
      for (int s = 0; s < symbols_; ++s) {
        payload[static_cast<size_t>(s)] = gf256::add(
            payload[static_cast<size_t>(s)],
            gf256::mul(lead, ppay[static_cast<size_t>(s)]));
      }
      continue;
    }

    // New pivot: normalize, then eliminate this column from earlier rows.
    const uint8_t scale = gf256::inv(lead);
    for (int c = col; c < bucket_size_; ++c) {
      coeff[static_cast<size_t>(c)] =
          gf256::mul(coeff[static_cast<size_t>(c)], scale);
    }
    for (int s = 0; s < symbols_; ++s) {
      payload[static_cast<size_t>(s)] =
          gf256::mul(payload[static_cast<size_t>(s)], scale);
    }
    for (size_t r2 = 0; r2 < rows_.size(); ++r2) {
      const uint8_t f = rows_[r2][static_cast<size_t>(col)];
      if (f == 0) continue;
      for (int c = col; c < bucket_size_; ++c) {
        rows_[r2][static_cast<size_t>(c)] =
            gf256::add(rows_[r2][static_cast<size_t>(c)],
                       gf256::mul(f, coeff[static_cast<size_t>(c)]));
      }
      for (int s = 0; s < symbols_; ++s) {
        row_payloads_[r2][static_cast<size_t>(s)] =
            gf256::add(row_payloads_[r2][static_cast<size_t>(s)],
                       gf256::mul(f, payload[static_cast<size_t>(s)]));
      }
    }
    pivot_row_[static_cast<size_t>(col)] = static_cast<int>(rows_.size());
    rows_.push_back(std::move(coeff));
    row_payloads_.push_back(std::move(payload));
    ++rank_;
    return true;
  }
  return false;  // linearly dependent on what we already have
}

std::vector<std::vector<uint8_t>> GaussianDecoder::decode() const {
  if (!complete()) {
    throw std::logic_error("decode: rank is below bucket size");
  }
  std::vector<std::vector<uint8_t>> out(static_cast<size_t>(bucket_size_));
  // Reduced echelon with full rank: row at pivot c is exactly e_c.
  for (int c = 0; c < bucket_size_; ++c) {
    out[static_cast<size_t>(c)] =
        row_payloads_[static_cast<size_t>(pivot_row_[static_cast<size_t>(c)])];
  }
  return out;
}

std::optional<std::vector<std::vector<uint8_t>>> try_decode(
    const std::vector<CodedPacket>& received, int bucket_size) {
  const int symbols =
      received.empty() ? 0 : static_cast<int>(received.front().payload.size());
  GaussianDecoder dec(bucket_size, symbols);
  for (const auto& p : received) {
    dec.absorb(p);
    if (dec.complete()) return dec.decode();
  }
  return std::nullopt;
}

}  // namespace codesched
