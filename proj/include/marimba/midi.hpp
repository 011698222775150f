#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "marimba/melody.hpp"

namespace marimba {

struct NoteMap {
  std::map<std::string, int> keys;  // label -> MIDI key 0..127
  double time_scale = 1.0;          // seconds per unit of length
  int velocity = 100;
  double duration = 0.1;            // seconds
};

inline constexpr int kTicksPerQuarter = 480;
inline constexpr int kTicksPerSecond = 960;  // at 120 quarters per minute

NoteMap parse_note_map(const std::string& json_text);

// Standard MIDI file, format 0, one channel; `text` goes into a text meta
// event at tick 0 when non-empty.
std::vector<std::uint8_t> export_midi(const Melody& m, const NoteMap& map, const std::string& text = "");

struct MidiEvent {
  std::int64_t tick;
  bool on;
  int key;
  int velocity;
};

// Note events of a format-0 file written by export_midi, in file order.
std::vector<MidiEvent> parse_midi(const std::vector<std::uint8_t>& bytes);

}  // namespace marimba
