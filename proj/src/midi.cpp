#include "marimba/midi.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"

#include "marimba/errors.hpp"

namespace marimba {

NoteMap parse_note_map(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::Parse, std::string("note map: ") + e.what());
  }
  NoteMap map;
  if (!j.is_object() || !j.contains("keys") || !j["keys"].is_object()) throw Error(Errc::Parse, "note map needs a 'keys' object");
  for (const auto& [label, key] : j["keys"].items()) {
    if (!key.is_number_integer() || key.get<int>() < 0 || key.get<int>() > 127)
      throw Error(Errc::OutOfRange, "MIDI key for '" + label + "' must be an integer in 0..127");
    map.keys[label] = key.get<int>();
  }
  map.time_scale = j.value("time_scale", 1.0);
  map.velocity = j.value("velocity", 100);
  map.duration = j.value("duration", 0.1);
  if (!(map.time_scale > 0)) throw Error(Errc::OutOfRange, "time_scale must be positive");
  if (map.velocity < 1 || map.velocity > 127) throw Error(Errc::OutOfRange, "velocity must be in 1..127");
  if (!(map.duration > 0)) throw Error(Errc::OutOfRange, "duration must be positive");
  return map;
}

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>(v >> s));
}

void put_varlen(std::vector<std::uint8_t>& out, std::uint64_t v) {
  std::uint8_t buf[10];
  int n = 0;
  buf[n++] = v & 0x7f;
  while (v >>= 7) buf[n++] = static_cast<std::uint8_t>((v & 0x7f) | 0x80);
  while (n) out.push_back(buf[--n]);
}

}  // namespace

std::vector<std::uint8_t> export_midi(const Melody& m, const NoteMap& map, const std::string& text) {
  std::vector<int> key_of(m.labels.size(), -1);
  for (size_t i = 0; i < m.labels.size(); ++i) {
    auto it = map.keys.find(m.labels[i]);
    if (it != map.keys.end()) key_of[i] = it->second;
  }
  std::vector<MidiEvent> events;
  for (const auto& n : m.notes) {
    if (key_of[n.label] < 0) throw Error(Errc::UnmappedLabel, "no MIDI key for label '" + m.labels[n.label] + "'");
    double start = n.t * map.time_scale;
    auto on = static_cast<std::int64_t>(std::llround(start * kTicksPerSecond));
    auto off = static_cast<std::int64_t>(std::llround((start + map.duration) * kTicksPerSecond));
    events.push_back({on, true, key_of[n.label], map.velocity});
    events.push_back({std::max(off, on + 1), false, key_of[n.label], 0});
  }
  // Releases before presses at equal ticks so repeated keys retrigger.
  std::stable_sort(events.begin(), events.end(), [](const MidiEvent& a, const MidiEvent& b) {
    if (a.tick != b.tick) return a.tick < b.tick;
    return !a.on && b.on;
  });

  std::vector<std::uint8_t> track;
  put_varlen(track, 0);
  track.insert(track.end(), {0xff, 0x51, 0x03, 0x07, 0xa1, 0x20});  // 500000 us per quarter
  if (!text.empty()) {
    put_varlen(track, 0);
    track.insert(track.end(), {0xff, 0x01});
    put_varlen(track, text.size());
    track.insert(track.end(), text.begin(), text.end());
  }
  std::int64_t now = 0;
  for (const auto& e : events) {
    put_varlen(track, static_cast<std::uint64_t>(e.tick - now));
    now = e.tick;
    track.push_back(e.on ? 0x90 : 0x80);
    track.push_back(static_cast<std::uint8_t>(e.key));
    track.push_back(static_cast<std::uint8_t>(e.velocity));
  }
  put_varlen(track, 0);
  track.insert(track.end(), {0xff, 0x2f, 0x00});

  std::vector<std::uint8_t> out{'M', 'T', 'h', 'd'};
  put_u32(out, 6);
  out.insert(out.end(), {0x00, 0x00, 0x00, 0x01, static_cast<std::uint8_t>(kTicksPerQuarter >> 8),
                         static_cast<std::uint8_t>(kTicksPerQuarter & 0xff)});
  out.insert(out.end(), {'M', 'T', 'r', 'k'});
  put_u32(out, static_cast<std::uint32_t>(track.size()));
  out.insert(out.end(), track.begin(), track.end());
  return out;
}

std::vector<MidiEvent> parse_midi(const std::vector<std::uint8_t>& bytes) {
  size_t pos = 0;
  auto need = [&](size_t n) {
    if (pos + n > bytes.size()) throw Error(Errc::Parse, "truncated MIDI file");
  };
  auto u32 = [&]() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 8) | bytes[pos++];
    return v;
  };
  auto varlen = [&]() {
    std::uint64_t v = 0;
    for (int i = 0; i < 10; ++i) {
      need(1);
      std::uint8_t b = bytes[pos++];
      v = (v << 7) | (b & 0x7f);
      if (!(b & 0x80)) return v;
    }
    throw Error(Errc::Parse, "bad variable-length quantity");
  };
  need(8);
  if (!std::equal(bytes.begin(), bytes.begin() + 4, "MThd")) throw Error(Errc::Parse, "missing MThd");
  pos = 4;
  std::uint32_t header = u32();
  need(header);
  if (header < 6 || bytes[pos] != 0 || bytes[pos + 1] != 0) throw Error(Errc::Parse, "not a format-0 file");
  pos += header;
  need(8);
  if (!std::equal(bytes.begin() + pos, bytes.begin() + pos + 4, "MTrk")) throw Error(Errc::Parse, "missing MTrk");
  pos += 4;
  std::uint32_t track_length = u32();
  size_t end = pos + track_length;
  if (end > bytes.size()) throw Error(Errc::Parse, "truncated track");
  std::vector<MidiEvent> out;
  std::int64_t tick = 0;
  while (pos < end) {
    tick += static_cast<std::int64_t>(varlen());
    need(1);
    std::uint8_t status = bytes[pos++];
    if (status == 0xff) {
      need(1);
      std::uint8_t type = bytes[pos++];
      std::uint64_t len = varlen();
      need(len);
      pos += len;
      if (type == 0x2f) break;
    } else if ((status & 0xe0) == 0x80) {
      need(2);
      int key = bytes[pos++], vel = bytes[pos++];
      bool on = (status & 0xf0) == 0x90 && vel > 0;
      out.push_back({tick, on, key, vel});
    } else {
      throw Error(Errc::Parse, "unsupported MIDI event");
    }
  }
  return out;
}

}  // namespace marimba
