#include "gloss/transport/xml_codec.hpp"

#include <charconv>
#include <expat.h>
#include <fmt/format.h>
#include <map>
#include <memory>
#include <vector>

#include "gloss/error.hpp"

namespace gloss::transport {

namespace {

constexpr int kMaxDepth = 8;

struct XmlNode {
  std::string name;
  std::map<std::string, std::string> attributes;
  std::vector<std::unique_ptr<XmlNode>> children;
  std::string text;
};

struct ParseState {
  XML_Parser parser = nullptr;
  std::unique_ptr<XmlNode> root;
  std::vector<XmlNode*> open;
  bool too_deep = false;
};

void on_start(void* data, const XML_Char* name, const XML_Char** attrs) {
  auto* st = static_cast<ParseState*>(data);
  if (static_cast<int>(st->open.size()) >= kMaxDepth) {
    st->too_deep = true;
    XML_StopParser(st->parser, XML_FALSE);
    return;
  }
  auto node = std::make_unique<XmlNode>();
  node->name = name;
  for (int i = 0; attrs[i] != nullptr; i += 2) node->attributes.emplace(attrs[i], attrs[i + 1]);
  XmlNode* raw = node.get();
  if (st->open.empty()) {
    st->root = std::move(node);
  } else {
    st->open.back()->children.push_back(std::move(node));
  }
  st->open.push_back(raw);
}

void on_end(void* data, const XML_Char*) { static_cast<ParseState*>(data)->open.pop_back(); }

void on_text(void* data, const XML_Char* s, int len) {
  auto* st = static_cast<ParseState*>(data);
  if (!st->open.empty()) st->open.back()->text.append(s, static_cast<std::size_t>(len));
}

std::unique_ptr<XmlNode> parse_fragment(std::string_view fragment) {
  std::unique_ptr<std::remove_pointer_t<XML_Parser>, decltype(&XML_ParserFree)> parser(XML_ParserCreate("UTF-8"),
                                                                                      &XML_ParserFree);
  if (!parser) throw std::bad_alloc();
  ParseState st;
  st.parser = parser.get();
  XML_SetUserData(parser.get(), &st);
  XML_SetElementHandler(parser.get(), &on_start, &on_end);
  XML_SetCharacterDataHandler(parser.get(), &on_text);
  const auto status = XML_Parse(parser.get(), fragment.data(), static_cast<int>(fragment.size()), XML_TRUE);
  if (st.too_deep) throw Error(Errc::SchemaViolation, "element nesting too deep");
  if (status != XML_STATUS_OK) {
    throw Error(Errc::MalformedXml, fmt::format("line {}: {}", XML_GetCurrentLineNumber(parser.get()),
                                                XML_ErrorString(XML_GetErrorCode(parser.get()))));
  }
  return std::move(st.root);
}

bool is_blank(std::string_view s) {
  return s.find_first_not_of(" \t\r\n") == std::string_view::npos;
}

const XmlNode& only_child(const XmlNode& parent, std::string_view name) {
  const XmlNode* found = nullptr;
  for (const auto& c : parent.children) {
    if (c->name == name) {
      if (found != nullptr) throw Error(Errc::SchemaViolation, "duplicate <" + std::string(name) + ">");
      found = c.get();
    }
  }
  if (found == nullptr) throw Error(Errc::SchemaViolation, "missing <" + std::string(name) + ">");
  return *found;
}

const std::string& attribute(const XmlNode& node, const std::string& name) {
  auto it = node.attributes.find(name);
  if (it == node.attributes.end()) {
    throw Error(Errc::SchemaViolation, "<" + node.name + "> lacks attribute '" + name + "'");
  }
  return it->second;
}

void expect_attributes(const XmlNode& node, std::size_t count) {
  if (node.attributes.size() != count) throw Error(Errc::SchemaViolation, "unexpected attributes on <" + node.name + ">");
  if (!node.children.empty() || !is_blank(node.text)) {
    throw Error(Errc::SchemaViolation, "<" + node.name + "> must be empty");
  }
}

double parse_degrees(const std::string& text) {
  // Plain decimal only: optional sign, digits, optional fraction.
  std::size_t i = (!text.empty() && text[0] == '-') ? 1 : 0;
  std::size_t digits = 0;
  bool dot = false;
  for (; i < text.size(); ++i) {
    if (text[i] >= '0' && text[i] <= '9') {
      ++digits;
    } else if (text[i] == '.' && !dot) {
      dot = true;
    } else {
      digits = 0;
      break;
    }
  }
  double value = 0;
  if (digits == 0 || std::from_chars(text.data(), text.data() + text.size(), value).ec != std::errc{}) {
    throw Error(Errc::SchemaViolation, "'" + text + "' is not a decimal coordinate");
  }
  return value;
}

}  // namespace

std::string xml_encode(const LocationEvent& event) {
  return fmt::format(
      "<locationEvent><user id=\"{}\"/><position lat=\"{:.5f}\" lon=\"{:.5f}\"/><timestamp>{}</timestamp>"
      "</locationEvent>",
      event.user.str(), event.position.lat(), event.position.lon(), format_timestamp(event.timestamp));
}

void xml_check_well_formed(std::string_view fragment) { parse_fragment(fragment); }

LocationEvent xml_decode(std::string_view fragment) {
  const auto root = parse_fragment(fragment);
  if (!root || root->name != "locationEvent") {
    throw Error(Errc::SchemaViolation, "root element must be <locationEvent>");
  }
  if (!root->attributes.empty() || !is_blank(root->text)) {
    throw Error(Errc::SchemaViolation, "<locationEvent> carries only child elements");
  }
  for (const auto& c : root->children) {
    if (c->name != "user" && c->name != "position" && c->name != "timestamp") {
      throw Error(Errc::SchemaViolation, "unexpected element <" + c->name + ">");
    }
  }
  const XmlNode& user = only_child(*root, "user");
  const XmlNode& position = only_child(*root, "position");
  const XmlNode& timestamp = only_child(*root, "timestamp");
  expect_attributes(user, 1);
  expect_attributes(position, 2);
  if (!timestamp.attributes.empty() || !timestamp.children.empty()) {
    throw Error(Errc::SchemaViolation, "<timestamp> holds text only");
  }

  const std::string& id = attribute(user, "id");
  if (!UserId::valid(id)) throw Error(Errc::SchemaViolation, "user id '" + id + "' is not a phone number");
  const double lat = parse_degrees(attribute(position, "lat"));
  const double lon = parse_degrees(attribute(position, "lon"));

  std::string_view ts = timestamp.text;
  ts.remove_prefix(std::min(ts.find_first_not_of(" \t\r\n"), ts.size()));
  ts = ts.substr(0, ts.find_last_not_of(" \t\r\n") + 1);
  Timestamp when;
  try {
    when = parse_timestamp(ts);
  } catch (const Error& e) {
    throw Error(Errc::SchemaViolation, e.what());
  }
  return make_location_event(UserId(id), LatLongCoordinate(lat, lon), when);
}

pipeline::Codec location_codec() {
  pipeline::Codec codec;
  codec.name = std::string(kLocationCodecName);
  codec.record_type = typeid(LocationEvent);
  codec.encode = [](const std::any& value) { return xml_encode(std::any_cast<const LocationEvent&>(value)); };
  codec.decode = [](std::string_view text) -> std::any { return xml_decode(text); };
  return codec;
}

const pipeline::CodecRegistry& standard_codecs() {
  static const pipeline::CodecRegistry registry = [] {
    pipeline::CodecRegistry r;
    r.add(location_codec());
    return r;
  }();
  return registry;
}

}  // namespace gloss::transport
