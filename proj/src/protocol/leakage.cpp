#include "privade/protocol/leakage.hpp"

#include <algorithm>
#include <cstring>
#include <unordered_map>

#include "privade/protocol/payloads.hpp"

namespace privade::protocol {

using numerics::FixedTensor;

namespace {

constexpr std::size_t kKey = 8;

Bytes raw_bytes(const FixedTensor& t) {
  ByteWriter w;
  for (std::int32_t v : t.raw()) w.i32_le(v);
  return std::move(w).take();
}

void add(std::vector<SecretPattern>& out, std::string label, const FixedTensor& t) {
  Bytes b = raw_bytes(t);
  if (b.size() < kKey || std::all_of(b.begin(), b.end(), [](std::uint8_t x) { return x == 0; })) return;
  out.push_back({std::move(label), std::move(b)});
}

void add_block(std::vector<SecretPattern>& out, const std::string& name, const numerics::Model& m) {
  for (std::size_t l = 0; l < m.size(); ++l) {
    const auto& ps = m.layer(l).params();
    for (std::size_t p = 0; p < ps.size(); ++p) {
      add(out, name + " layer " + std::to_string(l) + " tensor " + std::to_string(p), ps[p]);
    }
  }
}

std::uint64_t key_at(const std::uint8_t* p) {
  std::uint64_t k;
  std::memcpy(&k, p, kKey);
  return k;
}

class Matcher {
 public:
  explicit Matcher(const std::vector<SecretPattern>& patterns) : patterns_(patterns) {
    for (std::size_t i = 0; i < patterns.size(); ++i) index_[key_at(patterns[i].bytes.data())].push_back(i);
  }

  // First pattern found in `text`, if any.
  const SecretPattern* find(const Bytes& text) const {
    if (text.size() < kKey) return nullptr;
    for (std::size_t pos = 0; pos + kKey <= text.size(); ++pos) {
      auto it = index_.find(key_at(text.data() + pos));
      if (it == index_.end()) continue;
      for (std::size_t i : it->second) {
        const Bytes& pat = patterns_[i].bytes;
        if (pos + pat.size() <= text.size() && std::equal(pat.begin(), pat.end(), text.begin() + pos)) {
          return &patterns_[i];
        }
      }
    }
    return nullptr;
  }

 private:
  const std::vector<SecretPattern>& patterns_;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> index_;
};

}  // namespace

nlohmann::json LeakageReport::to_json() const {
  nlohmann::json f = nlohmann::json::array();
  for (const auto& x : findings) f.push_back({{"observer", to_string(x.observer)}, {"seq", x.seq}, {"secret", x.secret}});
  return {{"clean", clean()}, {"findings", f}, {"p1_bytes", p1_bytes}, {"p2_bytes", p2_bytes}, {"patterns", patterns}};
}

LeakageSecrets collect_secrets(const split::SplitModel& model, const selection::Dataset& data,
                               const std::vector<std::size_t>& rep) {
  LeakageSecrets s;
  for (std::size_t i = 0; i < data.size(); ++i) {
    add(s.hidden_from_p1, "x[" + std::to_string(i) + "]", data.xs[i]);
  }
  // One-hot labels repeat across points; one pattern per class suffices.
  std::vector<bool> seen(data.num_classes, false);
  for (std::size_t i = 0; i < data.size(); ++i) {
    std::size_t c = data.class_of(i);
    if (seen[c]) continue;
    seen[c] = true;
    add(s.hidden_from_p1, "label class " + std::to_string(c), data.ys[i]);
  }
  std::vector<std::uint32_t> inverse(model.mixer.size());
  for (std::size_t ch = 0; ch < model.mixer.size(); ++ch) inverse[model.mixer[ch]] = static_cast<std::uint32_t>(ch);
  for (std::size_t i : rep) {
    FixedTensor mixed = model.a.forward(data.xs[i]);
    add(s.hidden_from_p1, "unmixed A activation of x[" + std::to_string(i) + "]",
        split::permute_channels(mixed, inverse));
  }
  add_block(s.hidden_from_p2, "theta_A", model.a);
  add_block(s.hidden_from_p2, "theta_C", model.c);
  return s;
}

LeakageReport scan_leakage(const Transcript& transcript, const LeakageSecrets& secrets) {
  LeakageReport r;
  r.patterns = secrets.hidden_from_p1.size() + secrets.hidden_from_p2.size();
  Matcher p1(secrets.hidden_from_p1), p2(secrets.hidden_from_p2);
  for (const auto& m : transcript.frames) {
    bool to_p1 = visible_to(m, PartyId::Alice), to_p2 = visible_to(m, PartyId::Bob);
    if (!to_p1 && !to_p2) continue;
    Bytes body = redact_revelations(m);
    if (to_p1) {
      r.p1_bytes += body.size();
      if (const auto* hit = p1.find(body)) r.findings.push_back({PartyId::Alice, m.seq, hit->label});
    }
    if (to_p2) {
      r.p2_bytes += body.size();
      if (const auto* hit = p2.find(body)) r.findings.push_back({PartyId::Bob, m.seq, hit->label});
    }
  }
  return r;
}

}  // namespace privade::protocol
