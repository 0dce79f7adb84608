// Copyright 2026 The acbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "acb/rvq.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

#include "acb/error.hpp"
#include "acb/parallel.hpp"
#include "acb/rng.hpp"
#include "binio.hpp"

namespace acb {

namespace {

constexpr char kMagic[4] = {'A', 'C', 'B', 'M'};
constexpr uint16_t kVersion = 1;

double sq_dist(const double* a, const double* b, uint32_t dim) {
  double s = 0.0;
  for (uint32_t i = 0; i < dim; ++i) {
    double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

// Argmin over centroids of ||p - c||^2. Score drops the ||p||^2 term; a
// strict < comparison makes exact ties resolve to the lowest index.
uint32_t nearest(const double* p, const std::vector<double>& centroids,
                 const std::vector<double>& half_norms, uint32_t k,
                 uint32_t dim) {
  uint32_t best = 0;
  double best_score = std::numeric_limits<double>::infinity();
  for (uint32_t c = 0; c < k; ++c) {
    const double* row = centroids.data() + static_cast<size_t>(c) * dim;
    double dot = 0.0;
    for (uint32_t i = 0; i < dim; ++i) dot += p[i] * row[i];
    double score = half_norms[c] - dot;
    if (score < best_score) {
      best_score = score;
      best = c;
    }
  }
  return best;
}

std::vector<double> half_squared_norms(const std::vector<double>& centroids,
                                       uint32_t k, uint32_t dim) {
  std::vector<double> h(k);
  for (uint32_t c = 0; c < k; ++c) {
    const double* row = centroids.data() + static_cast<size_t>(c) * dim;
    double s = 0.0;
    for (uint32_t i = 0; i < dim; ++i) s += row[i] * row[i];
    h[c] = 0.5 * s;
  }
  return h;
}

}  // namespace

void Codebook::validate() const {
  if (k == 0 || dim == 0) throw ValidationError("codebook: empty shape");
  if (centroids.size() != static_cast<size_t>(k) * dim)
    throw ValidationError("codebook: centroid buffer does not match k*dim");
  for (double v : centroids)
    if (!std::isfinite(v))
      throw ValidationError("codebook: non-finite centroid");
  for (uint32_t a = 0; a < k; ++a)
    for (uint32_t b = a + 1; b < k; ++b) {
      double m = 0.0;
      for (uint32_t i = 0; i < dim; ++i)
        m = std::max(m, std::fabs(row(a)[i] - row(b)[i]));
      if (m <= 1e-12)
        throw ValidationError("codebook: duplicate centroids " +
                              std::to_string(a) + " and " + std::to_string(b));
    }
}

std::vector<uint32_t> RvqModel::codebook_sizes() const {
  std::vector<uint32_t> sizes;
  sizes.reserve(stages.size());
  for (const auto& s : stages) sizes.push_back(s.k);
  return sizes;
}

void RvqModel::validate() const {
  if (stages.empty()) throw ValidationError("rvq model: no stages");
  if (frame_len == 0 || hop == 0 || sample_rate == 0)
    throw ValidationError("rvq model: zero framing parameter");
  if (hop * 2 != frame_len)
    throw ValidationError("rvq model: hop must be frame_len/2");
  for (const auto& s : stages) {
    s.validate();
    if (s.dim != frame_len)
      throw ValidationError("rvq model: stage dim does not match frame_len");
  }
}

FrameMatrix extract_frames(const Waveform& w, uint32_t frame_len,
                           uint32_t hop) {
  w.validate();
  if (frame_len == 0 || hop * 2 != frame_len)
    throw ValidationError("extract_frames: hop must be frame_len/2");
  if (w.samples.size() < frame_len)
    throw ValidationError("extract_frames: signal shorter than one frame");
  std::vector<double> win = hann_window(frame_len);
  uint32_t n_frames =
      static_cast<uint32_t>(frame_count(w.samples.size(), frame_len, hop));
  FrameMatrix f;
  f.n_frames = n_frames;
  f.n_bins = frame_len;
  f.kind = FrameKind::kTimeDomain;
  f.frame_rate = Rational{w.sample_rate, hop}.reduced();
  f.data.resize(static_cast<size_t>(n_frames) * frame_len);
  for (uint32_t t = 0; t < n_frames; ++t) {
    const double* src = w.samples.data() + static_cast<size_t>(t) * hop;
    double* dst = f.data.data() + static_cast<size_t>(t) * frame_len;
    for (uint32_t i = 0; i < frame_len; ++i) dst[i] = src[i] * win[i];
  }
  return f;
}

Waveform overlap_add(const FrameMatrix& frames, uint32_t frame_len,
                     uint32_t hop, uint32_t sample_rate) {
  if (frames.kind != FrameKind::kTimeDomain || frames.n_bins != frame_len)
    throw ValidationError("overlap_add: expected time-domain frames");
  std::vector<double> win = hann_window(frame_len);
  size_t out_len =
      static_cast<size_t>(frames.n_frames - 1) * hop + frame_len;
  std::vector<double> acc(out_len, 0.0);
  std::vector<double> weight(out_len, 0.0);
  for (uint32_t t = 0; t < frames.n_frames; ++t) {
    const double* src = frames.row(t);
    size_t off = static_cast<size_t>(t) * hop;
    for (uint32_t i = 0; i < frame_len; ++i) {
      acc[off + i] += src[i];
      weight[off + i] += win[i];
    }
  }
  Waveform w;
  w.sample_rate = sample_rate;
  w.samples.resize(out_len);
  for (size_t i = 0; i < out_len; ++i)
    w.samples[i] = weight[i] > 1e-8 ? acc[i] / weight[i] : 0.0;
  return w;
}

KMeansResult kmeans(const std::vector<double>& points, size_t n_points,
                    uint32_t dim, uint32_t k, uint64_t seed, uint32_t max_iter,
                    double tol, unsigned workers) {
  if (k == 0) throw ValidationError("kmeans: k must be positive");
  if (n_points < k)
    throw ValidationError("kmeans: insufficient points (" +
                          std::to_string(n_points) + " < k = " +
                          std::to_string(k) + ")");
  if (points.size() != n_points * dim)
    throw ValidationError("kmeans: point buffer does not match n*dim");
  Rng rng(seed);
  const auto point = [&](size_t i) {
    return points.data() + i * dim;
  };

  // k-means++ seeding: squared-distance-weighted draws.
  std::vector<double> centroids(static_cast<size_t>(k) * dim);
  std::vector<double> min_d2(n_points, std::numeric_limits<double>::infinity());
  size_t first = rng.uniform_u64(n_points);
  std::memcpy(centroids.data(), point(first), dim * sizeof(double));
  for (uint32_t c = 1; c < k; ++c) {
    const double* last = centroids.data() + static_cast<size_t>(c - 1) * dim;
    parallel_for(n_points, workers, [&](size_t i) {
      double d2 = sq_dist(point(i), last, dim);
      if (d2 < min_d2[i]) min_d2[i] = d2;
    });
    size_t pick = rng.weighted(min_d2);
    std::memcpy(centroids.data() + static_cast<size_t>(c) * dim, point(pick),
                dim * sizeof(double));
  }

  std::vector<uint32_t> assign(n_points, 0);
  std::vector<double> d2(n_points, 0.0);
  std::vector<size_t> counts(k, 0);
  double prev_inertia = std::numeric_limits<double>::infinity();
  double inertia = prev_inertia;
  uint32_t iter = 0;
  for (; iter < max_iter; ++iter) {
    std::vector<double> half_norms = half_squared_norms(centroids, k, dim);
    parallel_for(n_points, workers, [&](size_t i) {
      uint32_t a = nearest(point(i), centroids, half_norms, k, dim);
      assign[i] = a;
      d2[i] = sq_dist(point(i), centroids.data() + static_cast<size_t>(a) * dim,
                      dim);
    });

    // Empty clusters steal the point farthest from its current centroid.
    std::fill(counts.begin(), counts.end(), 0);
    for (size_t i = 0; i < n_points; ++i) ++counts[assign[i]];
    for (uint32_t c = 0; c < k; ++c) {
      if (counts[c] != 0) continue;
      size_t far = 0;
      double far_d2 = -1.0;
      for (size_t i = 0; i < n_points; ++i)
        if (counts[assign[i]] > 1 && d2[i] > far_d2) {
          far_d2 = d2[i];
          far = i;
        }
      --counts[assign[far]];
      assign[far] = c;
      counts[c] = 1;
      d2[far] = 0.0;
      std::memcpy(centroids.data() + static_cast<size_t>(c) * dim, point(far),
                  dim * sizeof(double));
    }

    inertia = 0.0;
    for (size_t i = 0; i < n_points; ++i) inertia += d2[i];

    // Mean update, accumulated in point order for determinism.
    std::vector<double> sums(static_cast<size_t>(k) * dim, 0.0);
    for (size_t i = 0; i < n_points; ++i) {
      double* dst = sums.data() + static_cast<size_t>(assign[i]) * dim;
      const double* src = point(i);
      for (uint32_t j = 0; j < dim; ++j) dst[j] += src[j];
    }
    for (uint32_t c = 0; c < k; ++c)
      if (counts[c] > 0) {
        double inv = 1.0 / static_cast<double>(counts[c]);
        double* dst = centroids.data() + static_cast<size_t>(c) * dim;
        const double* src = sums.data() + static_cast<size_t>(c) * dim;
        for (uint32_t j = 0; j < dim; ++j) dst[j] = src[j] * inv;
      }

    if (prev_inertia - inertia <= tol * prev_inertia) {
      ++iter;
      break;
    }
    prev_inertia = inertia;
  }

  // Final inertia against the updated centroids.
  std::vector<double> half_norms = half_squared_norms(centroids, k, dim);
  std::vector<double> final_d2(n_points, 0.0);
  parallel_for(n_points, workers, [&](size_t i) {
    uint32_t a = nearest(point(i), centroids, half_norms, k, dim);
    final_d2[i] =
        sq_dist(point(i), centroids.data() + static_cast<size_t>(a) * dim, dim);
  });
  inertia = 0.0;
  for (size_t i = 0; i < n_points; ++i) inertia += final_d2[i];

  KMeansResult r;
  r.centroids = std::move(centroids);
  r.inertia = inertia;
  r.iterations = iter;
  return r;
}

RvqModel train_rvq(const std::vector<Waveform>& corpus, uint32_t n_stages,
                   const std::vector<uint32_t>& stage_sizes, uint64_t seed,
                   uint32_t frame_len, uint32_t hop, uint32_t sample_rate,
                   unsigned workers) {
  if (n_stages == 0) throw ValidationError("train_rvq: need at least 1 stage");
  if (stage_sizes.size() != n_stages)
    throw ValidationError("train_rvq: stage_sizes must match n_stages");
  for (uint32_t k : stage_sizes)
    if (k == 0) throw ValidationError("train_rvq: K < 1");
  if (corpus.empty()) throw ValidationError("train_rvq: empty corpus");

  std::vector<double> residuals;
  size_t n_frames = 0;
  for (const auto& utt : corpus) {
    Waveform w = utt.sample_rate == sample_rate ? utt : resample(utt, sample_rate);
    FrameMatrix f = extract_frames(w, frame_len, hop);
    residuals.insert(residuals.end(), f.data.begin(), f.data.end());
    n_frames += f.n_frames;
  }
  uint32_t max_k = *std::max_element(stage_sizes.begin(), stage_sizes.end());
  if (n_frames < max_k)
    throw ValidationError("train_rvq: insufficient frames (" +
                          std::to_string(n_frames) + ") for K = " +
                          std::to_string(max_k));

  RvqModel m;
  m.frame_len = frame_len;
  m.hop = hop;
  m.sample_rate = sample_rate;
  for (uint32_t s = 0; s < n_stages; ++s) {
    KMeansResult km = kmeans(residuals, n_frames, frame_len, stage_sizes[s],
                             mix_seed(seed, s), 50, 1e-6, workers);
    Codebook book;
    book.k = stage_sizes[s];
    book.dim = frame_len;
    book.centroids = std::move(km.centroids);

    // Identical centroids can survive on degenerate corpora; nudge later
    // duplicates so every token id stays distinguishable.
    for (uint32_t a = 0; a < book.k; ++a)
      for (uint32_t b = a + 1; b < book.k; ++b) {
        double mx = 0.0;
        for (uint32_t i = 0; i < frame_len; ++i)
          mx = std::max(mx,
                        std::fabs(book.row(a)[i] - book.row(b)[i]));
        if (mx <= 1e-12)
          book.centroids[static_cast<size_t>(b) * frame_len] +=
              1e-9 * static_cast<double>(b + 1);
      }

    std::vector<double> half_norms =
        half_squared_norms(book.centroids, book.k, frame_len);
    parallel_for(n_frames, workers, [&](size_t i) {
      double* p = residuals.data() + i * frame_len;
      uint32_t a = nearest(p, book.centroids, half_norms, book.k, frame_len);
      const double* c = book.row(a);
      for (uint32_t j = 0; j < frame_len; ++j) p[j] -= c[j];
    });

    m.stage_inertia.push_back(km.inertia);
    m.stages.push_back(std::move(book));
  }
  m.validate();
  return m;
}

TokenGrid rvq_encode(const RvqModel& m, const Waveform& w) {
  if (m.stages.empty()) throw ValidationError("rvq_encode: untrained model");
  Waveform x = w.sample_rate == m.sample_rate ? w : resample(w, m.sample_rate);
  FrameMatrix f = extract_frames(x, m.frame_len, m.hop);

  std::vector<std::vector<double>> half_norms;
  half_norms.reserve(m.stages.size());
  for (const auto& s : m.stages)
    half_norms.push_back(half_squared_norms(s.centroids, s.k, s.dim));

  TokenGrid g;
  g.n_frames = static_cast<uint32_t>(f.n_frames);
  g.n_codebooks = m.n_stages();
  g.codebook_sizes = m.codebook_sizes();
  g.token_rate = Rational{m.sample_rate, m.hop}.reduced();
  g.source_codec = "ref-rvq";
  g.tokens.resize(static_cast<size_t>(f.n_frames) * g.n_codebooks);
  std::vector<double> residual(m.frame_len);
  for (uint32_t t = 0; t < f.n_frames; ++t) {
    std::memcpy(residual.data(), f.row(t), m.frame_len * sizeof(double));
    for (uint32_t s = 0; s < m.n_stages(); ++s) {
      const Codebook& book = m.stages[s];
      uint32_t a = nearest(residual.data(), book.centroids, half_norms[s],
                           book.k, book.dim);
      g.at(t, s) = a;
      const double* c = book.row(a);
      for (uint32_t j = 0; j < m.frame_len; ++j) residual[j] -= c[j];
    }
  }
  return g;
}

Waveform rvq_decode(const RvqModel& m, const TokenGrid& g) {
  if (m.stages.empty()) throw ValidationError("rvq_decode: untrained model");
  g.validate();
  if (g.n_codebooks > m.n_stages())
    throw ValidationError("rvq_decode: grid has more codebooks than stages");
  for (uint32_t c = 0; c < g.n_codebooks; ++c)
    if (g.codebook_sizes[c] != m.stages[c].k)
      throw ValidationError("rvq_decode: codebook sizes do not match model");

  FrameMatrix rec;
  rec.n_frames = g.n_frames;
  rec.n_bins = m.frame_len;
  rec.kind = FrameKind::kTimeDomain;
  rec.frame_rate = Rational{m.sample_rate, m.hop}.reduced();
  rec.data.assign(static_cast<size_t>(g.n_frames) * m.frame_len, 0.0);
  for (uint32_t t = 0; t < g.n_frames; ++t) {
    double* dst = rec.data.data() + static_cast<size_t>(t) * m.frame_len;
    for (uint32_t s = 0; s < g.n_codebooks; ++s) {
      const double* c = m.stages[s].row(g.at(t, s));
      for (uint32_t j = 0; j < m.frame_len; ++j) dst[j] += c[j];
    }
  }
  return overlap_add(rec, m.frame_len, m.hop, m.sample_rate);
}

void save_rvq(const RvqModel& m, const std::string& path) {
  m.validate();
  binio::Writer w(path);
  w.bytes(kMagic, 4);
  w.u16(kVersion);
  w.u16(static_cast<uint16_t>(m.n_stages()));
  for (const auto& s : m.stages) w.u32(s.k);
  w.u32(m.frame_len);
  w.u32(m.hop);
  w.u32(m.sample_rate);
  for (const auto& s : m.stages)
    for (double v : s.centroids) w.f64(v);
  w.close();
}

RvqModel load_rvq(const std::string& path) {
  binio::Reader r(path);
  char magic[4];
  r.bytes(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0)
    throw IoError(path + ": bad model file magic");
  uint16_t version = r.u16();
  if (version != kVersion)
    throw IoError(path + ": unsupported model version " +
                  std::to_string(version));
  uint16_t n = r.u16();
  if (n == 0) throw IoError(path + ": model has no stages");
  std::vector<uint32_t> sizes(n);
  for (auto& k : sizes) k = r.u32();
  RvqModel m;
  m.frame_len = r.u32();
  m.hop = r.u32();
  m.sample_rate = r.u32();
  for (uint32_t s = 0; s < n; ++s) {
    Codebook book;
    book.k = sizes[s];
    book.dim = m.frame_len;
    book.centroids.resize(static_cast<size_t>(book.k) * book.dim);
    for (auto& v : book.centroids) v = r.f64();
    m.stages.push_back(std::move(book));
  }
  if (!r.at_eof()) throw IoError(path + ": trailing bytes after centroids");
  try {
    m.validate();
  } catch (const ValidationError& e) {
    throw IoError(path + ": " + e.what());
  }
  return m;
}

namespace {

class RvqCodec final : public CodecAdapter {
 public:
  RvqCodec(RvqModel m, const std::string& name)
      : CodecAdapter(make_descriptor(m, name)), model_(std::move(m)) {
    model_.validate();
  }

  TokenGrid encode(const Waveform& w) override {
    TokenGrid g = rvq_encode(model_, w);
    g.source_codec = descriptor_.name;
    return g;
  }

  Waveform decode(const TokenGrid& g) override { return rvq_decode(model_, g); }

 private:
  static CodecDescriptor make_descriptor(const RvqModel& m,
                                         const std::string& name) {
    CodecDescriptor d;
    d.name = name;
    d.feature_type = FeatureType::kAcoustic;
    d.sample_rate = m.sample_rate;
    d.token_rate = Rational{m.sample_rate, m.hop}.reduced();
    d.n_codebooks = m.n_stages();
    d.codebook_sizes = m.codebook_sizes();
    return d;
  }

  RvqModel model_;
};

}  // namespace

std::unique_ptr<CodecAdapter> rvq_codec(RvqModel m, const std::string& name) {
  return std::make_unique<RvqCodec>(std::move(m), name);
}

}  // namespace acb
